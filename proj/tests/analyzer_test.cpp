#include <gtest/gtest.h>

#include <sstream>

#include "morphdis/analyzer.hpp"
#include "morphdis/corpus.hpp"
#include "morphdis/error.hpp"
#include "morphdis/vocab.hpp"

using namespace morphdis;

namespace {

const std::string kData = MORPHDIS_DATA_DIR;

MorphDictionary lmthm() { return load_dictionary(kData + "/lmthm/dictionary.tsv", Normalizer::identity()); }

Vocab vocab_with(const MorphDictionary& dict) {
  return build_vocab({}, Normalizer::identity(), dict.all_analyses());
}

std::vector<std::string> values(std::initializer_list<const char*> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Lmthm, SevenAnalysesOfOneSurface) {
  const MorphDictionary d = lmthm();
  EXPECT_EQ(d.entry_count(), 1u);
  EXPECT_EQ(d.analysis_count(), 7u);
  const auto* rows = d.lookup("lmthm");
  ASSERT_NE(rows, nullptr);
  ASSERT_EQ(rows->size(), 7u);
  EXPECT_EQ((*rows)[0].diac, "lam~atohum");
  EXPECT_EQ((*rows)[0].lemma, "lam~");
  EXPECT_EQ((*rows)[0].tag("per"), "3");
  EXPECT_EQ((*rows)[0].tag("enc0"), "dobj_3mp");
  EXPECT_EQ((*rows)[4].tag("stt"), "c");
  EXPECT_EQ((*rows)[4].tag("enc0"), "poss_3mp");
  EXPECT_EQ((*rows)[5].tag("prc1"), "li");
  EXPECT_EQ((*rows)[5].lemma, "mut~aham");
  EXPECT_EQ((*rows)[6].lemma, "mut~ahim");
  EXPECT_EQ(d.lookup("xyz"), nullptr);
}

TEST(Lmthm, RowsSixAndSevenDifferOnlyLexically) {
  const auto& rows = *lmthm().lookup("lmthm");
  EXPECT_EQ(rows[5].tags, rows[6].tags);
  EXPECT_NE(rows[5].lemma, rows[6].lemma);
  EXPECT_NE(rows[5].diac, rows[6].diac);
}

TEST(Lmthm, CandidateSetsAreFeatureUnions) {
  const MorphDictionary d = lmthm();
  const CandidateTagSets c = candidates(d, "lmthm", vocab_with(d));
  EXPECT_FALSE(c.oov);
  EXPECT_EQ(c.values[*tag_index("pos")], values({"noun", "verb"}));
  EXPECT_EQ(c.values[*tag_index("per")], values({"1", "2", "3", "na"}));
  EXPECT_EQ(c.values[*tag_index("stt")], values({"c", "i", "na"}));
  EXPECT_EQ(c.values[*tag_index("prc1")], values({"0", "li"}));
  EXPECT_EQ(c.values[*tag_index("prc3")], values({"0"}));
  EXPECT_EQ(c.values[*tag_index("enc0")], values({"0", "dobj_3mp", "poss_3mp"}));
}

TEST(Candidates, UnknownWordPolicies) {
  const MorphDictionary d = lmthm();
  const Vocab v = vocab_with(d);
  const CandidateTagSets all = candidates(d, "qqq", v, OovPolicy::all_values);
  EXPECT_TRUE(all.oov);
  for (std::size_t f = 0; f < kNumTags; ++f) EXPECT_EQ(all.count(f), v.tags[f].size());
  const CandidateTagSets closed = candidates(d, "qqq", v, OovPolicy::closed);
  EXPECT_TRUE(closed.oov);
  for (std::size_t f = 0; f < kNumTags; ++f) EXPECT_EQ(closed.count(f), 0u);
}

TEST(Dictionary, KeysAreNormalized) {
  std::istringstream in(">bc\tx\tx\tnoun\t0\t0\t0\t0\tna\tna\tna\tna\tm\ts\ti\tn\t0\n");
  std::map<std::string, std::string> table{{">", "A"}};
  const MorphDictionary d = parse_dictionary(in, "d", Normalizer(table));
  EXPECT_NE(d.lookup("Abc"), nullptr);
  EXPECT_EQ(d.lookup(">bc"), nullptr);
}

TEST(Dictionary, IncompleteAnalysisIsRejectedWithLine) {
  std::istringstream in("# c\nabc\tx\tx\tnoun\n");
  try {
    parse_dictionary(in, "d.tsv", Normalizer::identity());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Rules, ParseAndDescribe) {
  std::istringstream in("# c\nif pos=verb then cas in {na}\n\nif stt=d then prc0 in { Al_det , 0 }\n");
  const auto rules = parse_rules(in, "r");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[1].allowed, values({"Al_det", "0"}));
  EXPECT_EQ(rules[0].describe(), "if pos=verb then cas in {na}");
}

TEST(Rules, MalformedAndUnknownFeature) {
  std::istringstream bad("if pos verb then cas\n");
  EXPECT_THROW(parse_rules(bad, "r"), DataError);
  std::istringstream unknown("if color=red then cas in {na}\n");
  EXPECT_THROW(parse_rules(unknown, "r"), DataError);
  std::istringstream empty("if pos=verb then cas in {}\n");
  EXPECT_THROW(parse_rules(empty, "r"), DataError);
}

TEST(Consistency, LmthmIsConsistentUnderDefaults) {
  for (const auto& a : *lmthm().lookup("lmthm")) EXPECT_TRUE(check_consistency(a, default_rules()).empty());
}

TEST(Consistency, VerbWithCaseIsFlagged) {
  Analysis a = (*lmthm().lookup("lmthm"))[0];
  a.tags[*tag_index("cas")] = "n";
  const auto v = check_consistency(a, default_rules());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].feature, "cas");
  EXPECT_EQ(v[0].value, "n");
}

TEST(Consistency, MicroDictionarySatisfiesItsRules) {
  const MorphDictionary d = load_dictionary(kData + "/micro/dictionary.tsv",
                                            Normalizer::load(kData + "/micro/normalization.tsv"));
  const auto rules = load_rules(kData + "/micro/rules.txt");
  EXPECT_GT(rules.size(), 5u);
  std::size_t violations = 0;
  for (const auto& a : d.all_analyses()) violations += check_consistency(a, rules).size();
  EXPECT_EQ(violations, 0u);
}
