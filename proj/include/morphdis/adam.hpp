#pragma once

#include "morphdis/parameter.hpp"

namespace morphdis {

struct AdamConfig {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// Bias-corrected Adam update. Resets the gradient and bumps step_count.
// Throws NumericError naming the parameter if its gradient is not finite.
void adam_step(Parameter& param, const AdamConfig& config);

// Rescales all gradients so their joint L2 norm is at most `max_norm`.
// Returns the norm before clipping.
double clip_global_norm(ParameterStore& store, double max_norm);

}  // namespace morphdis
