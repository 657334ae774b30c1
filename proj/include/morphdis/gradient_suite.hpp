#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morphdis/gradcheck.hpp"
#include "morphdis/schema.hpp"

namespace morphdis {

inline constexpr double kGradientTolerance = 1e-4;

struct ComponentCheck {
  std::string component;
  GradCheckReport report;
  double seconds = 0.0;
};

// Three annotated tokens used by the full tagger and decoder checks.
Sentence gradient_fixture_sentence();

// Finite-difference checks, dropout off, for: embedding, linear, lstm_step,
// bilstm_2layer, attention, tagger_loss, decoder_loss.
std::vector<ComponentCheck> run_gradient_suite(std::uint64_t seed = 11);

}  // namespace morphdis
