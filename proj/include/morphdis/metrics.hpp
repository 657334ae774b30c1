#pragma once

#include <array>
#include <span>
#include <string>

#include "morphdis/normalizer.hpp"
#include "morphdis/schema.hpp"

namespace morphdis {

// POS, TAGS (all 14 tags), LEX (lemma), DIAC and FULL (all 16) accuracy.
struct MetricsReport {
  double pos = 0.0;
  double tags = 0.0;
  double lex = 0.0;
  double diac = 0.0;
  double full = 0.0;
  std::size_t tokens = 0;
  std::array<double, kNumTags> per_feature{};

  std::string summary() const;
};

MetricsReport evaluate_analyses(std::span<const Analysis> gold, std::span<const Analysis> system);

// Aligns sentences and tokens (by normalized surface) before scoring.
// Throws DataError naming the first divergence.
MetricsReport evaluate(const Corpus& gold, const Corpus& system, const Normalizer& normalizer);

}  // namespace morphdis
