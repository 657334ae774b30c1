#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "morphdis/model.hpp"

namespace morphdis {

// One nonnegative weight per feature (14 tags, lemma, diac).
struct RankingWeights {
  std::array<double, kNumFeatures> weights;

  RankingWeights() { weights.fill(1.0); }
  void validate() const;
  // Lines of `feature<TAB>float`; unlisted features keep weight 1.
  static RankingWeights parse(std::istream& in, const std::string& source);
  static RankingWeights load(const std::string& path);
};

enum class AnalysisSource { analyzer, model };

struct Disambiguation {
  Analysis chosen;
  double score = 0.0;
  AnalysisSource source = AnalysisSource::model;
  std::array<bool, kNumFeatures> matches{};
  bool oov = false;
};

std::array<bool, kNumFeatures> feature_matches(const Analysis& predicted, const Analysis& candidate);
double match_score(const Analysis& predicted, const Analysis& candidate, const RankingWeights& weights);

// Highest weighted match count wins; ties go to the earlier candidate.
Disambiguation rank_analyses(const Analysis& predicted, std::span<const Analysis> candidates,
                             const RankingWeights& weights);

enum class DisambiguationMode { analyzer, model };

// The dictionary (if any) always feeds the tagger's candidate features. In
// analyzer mode, known tokens are ranked against their analyses and
// unknown tokens fall back to the raw model output (flagged oov). In model
// mode every token gets the raw model output; its score is the summed log
// probability of the predicted tags, lemma and diac.
std::vector<Disambiguation> disambiguate(const JointModel& model, const MorphDictionary* dictionary,
                                         const RankingWeights& weights, const Sentence& sentence,
                                         const DecodeConfig& decode,
                                         DisambiguationMode mode = DisambiguationMode::analyzer);

// Corpus columns followed by score, source and oov.
void write_disambiguation(std::ostream& out, const Sentence& sentence,
                          std::span<const Disambiguation> results);

}  // namespace morphdis
