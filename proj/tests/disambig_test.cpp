#include <gtest/gtest.h>

#include <sstream>

#include "morphdis/corpus.hpp"
#include "morphdis/disambig.hpp"
#include "morphdis/error.hpp"
#include "morphdis/metrics.hpp"
#include "morphdis/utf8.hpp"

using namespace morphdis;

namespace {

const std::string kData = MORPHDIS_DATA_DIR;

std::vector<Analysis> lmthm() {
  return *load_dictionary(kData + "/lmthm/dictionary.tsv", Normalizer::identity()).lookup("lmthm");
}

Analysis simple(const std::string& diac, const std::string& lemma, const std::string& pos) {
  Analysis a;
  a.diac = diac;
  a.lemma = lemma;
  a.tags.fill("na");
  a.tags[0] = pos;
  return a;
}

RankingWeights parse_weights(const std::string& text) {
  std::istringstream in(text);
  return RankingWeights::parse(in, "w.tsv");
}

}  // namespace

TEST(Ranking, LmthmPrefersTheMatchingLemma) {
  const auto rows = lmthm();
  Analysis predicted = rows[5];
  predicted.diac = "limutahamK";
  const Disambiguation d = rank_analyses(predicted, rows, RankingWeights{});
  EXPECT_EQ(d.chosen.diac, "limut~ahamK");
  EXPECT_EQ(d.score, 15.0);
  EXPECT_FALSE(d.matches[kDiacFeature]);
  EXPECT_TRUE(d.matches[kLemmaFeature]);
  EXPECT_EQ(d.source, AnalysisSource::analyzer);

  predicted.lemma = "mut~ahim";
  EXPECT_EQ(rank_analyses(predicted, rows, RankingWeights{}).chosen.diac, "limut~ahimK");
  EXPECT_EQ(rank_analyses(rows[0], rows, RankingWeights{}).score, 16.0);
}

TEST(Ranking, TiesGoToTheEarlierCandidate) {
  const std::vector<Analysis> c{simple("a", "x", "noun"), simple("b", "x", "noun")};
  EXPECT_EQ(rank_analyses(simple("z", "x", "noun"), c, RankingWeights{}).chosen.diac, "a");
}

TEST(Ranking, SingleCandidateIsAlwaysChosen) {
  const std::vector<Analysis> c{simple("a", "x", "noun")};
  const Disambiguation d = rank_analyses(simple("q", "q", "verb"), c, RankingWeights{});
  EXPECT_EQ(d.chosen, c[0]);
  EXPECT_EQ(d.score, 13.0);
  EXPECT_THROW(rank_analyses(c[0], std::span<const Analysis>{}, RankingWeights{}), UsageError);
}

TEST(Ranking, ScalingWeightsKeepsTheChoice) {
  const auto rows = lmthm();
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    RankingWeights w;
    for (double& x : w.weights) x = rng.uniform(0.0, 2.0);
    RankingWeights scaled = w;
    for (double& x : scaled.weights) x *= 4.0;
    Analysis predicted = rows[rng.below(rows.size())];
    predicted.tags[rng.below(kNumTags)] = "other";
    EXPECT_EQ(rank_analyses(predicted, rows, w).chosen, rank_analyses(predicted, rows, scaled).chosen);
  }
}

TEST(Ranking, WeightedScoreSumsMatchedWeights) {
  const auto rows = lmthm();
  RankingWeights w;
  w.weights.fill(0.0);
  w.weights[kLemmaFeature] = 2.0;
  w.weights[*feature_index("per")] = 0.5;
  EXPECT_EQ(match_score(rows[0], rows[1], w), 0.0);
  EXPECT_EQ(match_score(rows[1], rows[2], w), 2.5);
}

TEST(Weights, FileParsing) {
  const RankingWeights w = parse_weights("# weights\nlemma\t3\ncas\t0\n");
  EXPECT_EQ(w.weights[kLemmaFeature], 3.0);
  EXPECT_EQ(w.weights[*feature_index("cas")], 0.0);
  EXPECT_EQ(w.weights[0], 1.0);
  EXPECT_THROW(parse_weights("colour\t1\n"), DataError);
  EXPECT_THROW(parse_weights("lemma\tabc\n"), DataError);
  EXPECT_THROW(parse_weights("lemma\t-1\n"), DataError);
  EXPECT_THROW(parse_weights("lemma 1\n"), DataError);
  std::string zeros;
  for (std::size_t f = 0; f < kNumFeatures; ++f) zeros += std::string(feature_name(f)) + "\t0\n";
  EXPECT_THROW(parse_weights(zeros), DataError);
  EXPECT_THROW(RankingWeights::load("/nonexistent/w.tsv"), DataError);
}

TEST(Disambiguate, ModesOnAFreshModel) {
  const Normalizer n = Normalizer::load(kData + "/micro/normalization.tsv");
  const MorphDictionary dict = load_dictionary(kData + "/micro/dictionary.tsv", n);
  const Corpus corpus = parse_corpus(kData + "/micro/corpus.tsv");
  ModelConfig c;
  c.char_dim = c.word_dim = c.char_hidden = c.tag_dim = 3;
  c.tagger_hidden = c.head_hidden = c.encoder_hidden = c.decoder_hidden = 4;
  c.char_layers = c.tagger_layers = c.encoder_layers = c.decoder_layers = 1;
  c.window = 3;
  const JointModel model(c, build_vocab(corpus, n, dict.all_analyses()), n, 2);
  Sentence s = corpus[0];
  s.push_back({"qqxq", {}});
  DecodeConfig decode;
  decode.beam_width = 2;

  const auto ranked = disambiguate(model, &dict, RankingWeights{}, s, decode);
  const auto raw = disambiguate(model, &dict, RankingWeights{}, s, decode, DisambiguationMode::model);
  const auto predicted = model.predict(model.prepare(s, &dict, false), decode);
  ASSERT_EQ(ranked.size(), s.size());
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    const auto& options = *dict.lookup(n(s[j].surface));
    EXPECT_NE(std::find(options.begin(), options.end(), ranked[j].chosen), options.end());
    EXPECT_EQ(ranked[j].source, AnalysisSource::analyzer);
    EXPECT_FALSE(ranked[j].oov);
  }
  EXPECT_TRUE(ranked.back().oov);
  EXPECT_EQ(ranked.back().source, AnalysisSource::model);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_EQ(raw[j].chosen, predicted[j].analysis());
    EXPECT_EQ(raw[j].source, AnalysisSource::model);
    EXPECT_LE(raw[j].score, 0.0);
  }
  EXPECT_EQ(ranked.back().chosen, raw.back().chosen);

  std::ostringstream out;
  write_disambiguation(out, s, ranked);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    ASSERT_EQ(cols.size(), 20u);
    EXPECT_EQ(cols[0], s[rows].surface);
    EXPECT_EQ(cols[19], rows + 1 == s.size() ? "1" : "0");
    ++rows;
  }
  EXPECT_EQ(rows, s.size());
  CorpusReadOptions o;
  o.allow_extra_columns = true;
  std::istringstream back(out.str());
  const Corpus reread = parse_corpus(back, "out", o);
  ASSERT_EQ(reread.size(), 1u);
  EXPECT_EQ(reread[0][0].gold, ranked[0].chosen);
}

TEST(Metrics, IdentityScoresOne) {
  const auto rows = lmthm();
  const MetricsReport m = evaluate_analyses(rows, rows);
  EXPECT_EQ(m.tokens, 7u);
  for (double v : {m.pos, m.tags, m.lex, m.diac, m.full}) EXPECT_EQ(v, 1.0);
}

TEST(Metrics, HandComputedFixture) {
  const auto gold = lmthm();
  auto sys = gold;
  sys[0].lemma = "wrong";                        // lex + full
  sys[1].tags[0] = "noun";                       // pos + tags + full
  sys[2].diac = "x";                             // diac + full
  sys[3].tags[*tag_index("enc0")] = "0";         // tags + full
  const MetricsReport m = evaluate_analyses(gold, sys);
  EXPECT_DOUBLE_EQ(m.pos, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.tags, 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.lex, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.diac, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.full, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.per_feature[*tag_index("enc0")], 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.per_feature[*tag_index("cas")], 1.0);
  EXPECT_EQ(m.summary(), "tokens=7 full=" + format_double(3.0 / 7.0) + " tags=" + format_double(5.0 / 7.0) +
                             " diac=" + format_double(6.0 / 7.0) + " lex=" + format_double(6.0 / 7.0) +
                             " pos=" + format_double(6.0 / 7.0));
}

TEST(Metrics, LemmaOnlyErrorLowersLexAndFullOnly) {
  const auto gold = lmthm();
  auto sys = gold;
  sys[6].lemma = "mut~aham";
  const MetricsReport m = evaluate_analyses(gold, sys);
  EXPECT_EQ(m.tags, 1.0);
  EXPECT_EQ(m.diac, 1.0);
  EXPECT_DOUBLE_EQ(m.lex, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.full, 6.0 / 7.0);
}

TEST(Metrics, FullNeverExceedsComponents) {
  const auto base = lmthm();
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    auto sys = base;
    for (auto& a : sys) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        if (rng.uniform(0.0, 1.0) < 0.1) a.feature(f) = "zz";
      }
    }
    const MetricsReport m = evaluate_analyses(base, sys);
    EXPECT_LE(m.full, std::min({m.tags, m.lex, m.diac}));
    EXPECT_LE(m.tags, m.pos);
  }
}

TEST(Metrics, MisalignedCorporaNameTheDivergence) {
  Corpus gold{{{"ab", simple("a", "a", "noun")}, {"cd", simple("c", "c", "noun")}}};
  Corpus sys = gold;
  EXPECT_EQ(evaluate(gold, sys, Normalizer::identity()).full, 1.0);
  sys[0][1].surface = "ce";
  try {
    evaluate(gold, sys, Normalizer::identity());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("token 2"), std::string::npos) << msg;
  }
  sys[0].pop_back();
  EXPECT_THROW(evaluate(gold, sys, Normalizer::identity()), DataError);
  EXPECT_THROW(evaluate_analyses(std::vector<Analysis>(2), std::vector<Analysis>(3)), DataError);
  std::map<std::string, std::string> table{{"e", "d"}};
  sys = gold;
  sys[0][1].surface = "ce";
  EXPECT_EQ(evaluate(gold, sys, Normalizer(table)).full, 1.0);
}
