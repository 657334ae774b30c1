#include "morphdis/disambig.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "morphdis/corpus.hpp"
#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

void RankingWeights::validate() const {
  bool positive = false;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    if (!(weights[f] >= 0.0) || !std::isfinite(weights[f])) {
      throw UsageError("ranking weight for '" + std::string(feature_name(f)) +
                       "' must be a nonnegative number");
    }
    positive = positive || weights[f] > 0.0;
  }
  if (!positive) throw UsageError("at least one ranking weight must be positive");
}

RankingWeights RankingWeights::parse(std::istream& in, const std::string& source) {
  RankingWeights w;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw DataError(source, line_no, "expected feature<TAB>weight");
    auto f = feature_index(trim(cols[0]));
    const std::string value(trim(cols[1]));
    if (!f) throw DataError(source, line_no, "unknown feature '" + cols[0] + "'");
    try {
      w.weights[*f] = parse_double_value(cols[0], value);
    } catch (const UsageError& e) {
      throw DataError(source, line_no, e.what());
    }
  }
  try {
    w.validate();
  } catch (const UsageError& e) {
    throw DataError(source + ": " + e.what());
  }
  return w;
}

RankingWeights RankingWeights::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open weights file '" + path + "'");
  return parse(in, path);
}

std::array<bool, kNumFeatures> feature_matches(const Analysis& predicted, const Analysis& candidate) {
  std::array<bool, kNumFeatures> m{};
  for (std::size_t f = 0; f < kNumFeatures; ++f) m[f] = predicted.feature(f) == candidate.feature(f);
  return m;
}

double match_score(const Analysis& predicted, const Analysis& candidate, const RankingWeights& weights) {
  const auto m = feature_matches(predicted, candidate);
  double score = 0.0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    if (m[f]) score += weights.weights[f];
  }
  return score;
}

Disambiguation rank_analyses(const Analysis& predicted, std::span<const Analysis> candidates,
                             const RankingWeights& weights) {
  if (candidates.empty()) throw UsageError("rank_analyses: no candidate analyses");
  std::size_t best = 0;
  double best_score = match_score(predicted, candidates[0], weights);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = match_score(predicted, candidates[i], weights);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  Disambiguation d;
  d.chosen = candidates[best];
  d.score = best_score;
  d.source = AnalysisSource::analyzer;
  d.matches = feature_matches(predicted, d.chosen);
  return d;
}

std::vector<Disambiguation> disambiguate(const JointModel& model, const MorphDictionary* dictionary,
                                         const RankingWeights& weights, const Sentence& sentence,
                                         const DecodeConfig& decode, DisambiguationMode mode) {
  const bool rank = mode == DisambiguationMode::analyzer && dictionary != nullptr;
  const PreparedSentence prepared = model.prepare(sentence, dictionary, false);
  const auto predictions = model.predict(prepared, decode);
  std::vector<Disambiguation> out;
  for (std::size_t j = 0; j < predictions.size(); ++j) {
    const TokenPrediction& p = predictions[j];
    const Analysis predicted = p.analysis();
    const std::vector<Analysis>* entry =
        rank ? dictionary->lookup(prepared.tokens[j].surface) : nullptr;
    if (entry != nullptr && !entry->empty()) {
      out.push_back(rank_analyses(predicted, *entry, weights));
      continue;
    }
    Disambiguation d;
    d.chosen = predicted;
    d.source = AnalysisSource::model;
    d.matches.fill(true);
    d.oov = prepared.tokens[j].oov;
    double log_prob = p.lemma.log_prob + p.diac.log_prob;
    for (std::size_t f = 0; f < kNumTags; ++f) {
      log_prob += std::log(p.tags.distributions[f][p.tags.ids[f]]);
    }
    d.score = log_prob;
    out.push_back(std::move(d));
  }
  return out;
}

void write_disambiguation(std::ostream& out, const Sentence& sentence,
                          std::span<const Disambiguation> results) {
  if (sentence.size() != results.size()) {
    throw UsageError("write_disambiguation: sentence and results differ in length");
  }
  for (std::size_t j = 0; j < results.size(); ++j) {
    const Disambiguation& d = results[j];
    out << sentence[j].surface << '\t';
    write_analysis_columns(out, d.chosen);
    out << '\t' << format_double(d.score) << '\t'
        << (d.source == AnalysisSource::analyzer ? "analyzer" : "model") << '\t' << (d.oov ? 1 : 0)
        << '\n';
  }
  out << '\n';
}

}  // namespace morphdis
