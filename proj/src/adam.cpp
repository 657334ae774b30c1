#include "morphdis/adam.hpp"

#include <cmath>

#include "morphdis/error.hpp"

namespace morphdis {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw UsageError("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw UsageError("beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
}

void adam_step(Parameter& param, const AdamConfig& config) {
  if (!param.grad.all_finite()) {
    throw NumericError("non-finite gradient in parameter '" + param.name + "'");
  }
  ++param.step_count;
  const double t = static_cast<double>(param.step_count);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  auto& value = param.value.storage();
  auto& grad = param.grad.storage();
  auto& m = param.adam_m.storage();
  auto& v = param.adam_v.storage();
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double gi = grad[i];
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    value[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    grad[i] = 0.0;
  }
}

double clip_global_norm(ParameterStore& store, double max_norm) {
  double sq = 0.0;
  for (const auto& p : store) {
    for (double g : p->grad.storage()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& p : store) {
      for (double& g : p->grad.storage()) g *= factor;
    }
  }
  return norm;
}

}  // namespace morphdis
