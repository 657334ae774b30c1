#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "morphdis/normalizer.hpp"
#include "morphdis/schema.hpp"
#include "morphdis/vocab.hpp"

namespace morphdis {

// Extensional stand-in for a morphological analyzer: every analysis of a
// surface form is listed explicitly. Lists keep file order, which is the
// tie-breaker for ranking.
class MorphDictionary {
 public:
  MorphDictionary() = default;
  explicit MorphDictionary(std::string name) : name_(std::move(name)) {}

  void add(const std::string& normalized_surface, Analysis analysis);
  // nullptr for unknown words.
  const std::vector<Analysis>* lookup(std::string_view normalized_surface) const;

  const std::string& name() const { return name_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t analysis_count() const { return analysis_count_; }
  std::vector<Analysis> all_analyses() const;
  const std::map<std::string, std::vector<Analysis>, std::less<>>& entries() const { return entries_; }

 private:
  std::string name_;
  std::map<std::string, std::vector<Analysis>, std::less<>> entries_;
  std::size_t analysis_count_ = 0;
};

// Dictionary TSV: surface + diac + lemma + 14 tags; one analysis per line.
// Surfaces are normalized with `normalizer` before grouping.
MorphDictionary load_dictionary(const std::string& path, const Normalizer& normalizer);
MorphDictionary parse_dictionary(std::istream& in, const std::string& source,
                                 const Normalizer& normalizer);

enum class OovPolicy { all_values, closed };

struct CandidateTagSets {
  std::array<std::vector<std::string>, kNumTags> values;  // sorted, unique
  bool oov = false;

  std::size_t count(std::size_t feature) const { return values[feature].size(); }
};

// Per-feature union of the values over a word's analyses. Unknown words get
// every value of the tag vocabulary ("all_values") or empty sets ("closed").
CandidateTagSets candidates(const MorphDictionary& dict, std::string_view normalized_surface,
                            const Vocab& vocab, OovPolicy policy = OovPolicy::all_values);

struct ConsistencyRule {
  std::size_t condition_feature = 0;
  std::string condition_value;
  std::size_t required_feature = 0;
  std::vector<std::string> allowed;

  std::string describe() const;
};

struct Violation {
  std::string rule;
  std::string feature;
  std::string value;
};

// "if pos=verb then cas in {na}" per line; '#' comments and blank lines
// are skipped.
std::vector<ConsistencyRule> parse_rules(std::istream& in, const std::string& source);
std::vector<ConsistencyRule> load_rules(const std::string& path);
std::vector<ConsistencyRule> default_rules();

std::vector<Violation> check_consistency(const Analysis& analysis,
                                         const std::vector<ConsistencyRule>& rules);

}  // namespace morphdis
