#include "morphdis/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "morphdis/error.hpp"
#include "morphdis/rng.hpp"

namespace morphdis {

namespace {

double checked_loss(const ScalarLossFn& loss, bool backprop) {
  const double v = loss(backprop);
  if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss");
  return v;
}

}  // namespace

GradCheckReport grad_check(std::span<Parameter* const> params, const ScalarLossFn& loss,
                           double tolerance, const GradCheckOptions& options) {
  for (Parameter* p : params) p->zero_grad();
  checked_loss(loss, true);
  std::vector<Tensor> analytic;
  for (Parameter* p : params) analytic.push_back(p->grad);
  for (Parameter* p : params) p->zero_grad();

  Rng rng(options.seed);
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    std::vector<std::size_t> indices(p.value.size());
    std::iota(indices.begin(), indices.end(), 0);
    if (indices.size() > options.max_entries_per_param) {
      rng.shuffle(indices);
      indices.resize(options.max_entries_per_param);
      std::sort(indices.begin(), indices.end());
    }
    GradCheckEntry entry;
    entry.parameter = p.name;
    for (std::size_t i : indices) {
      const double original = p.value[i];
      p.value[i] = original + options.step;
      const double up = checked_loss(loss, false);
      p.value[i] = original - options.step;
      const double down = checked_loss(loss, false);
      p.value[i] = original;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel >= entry.max_relative_error) {
        entry.max_relative_error = rel;
        entry.worst_analytic = a;
        entry.worst_numeric = numeric;
      }
      ++entry.checked;
    }
    report.max_relative_error = std::max(report.max_relative_error, entry.max_relative_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace morphdis
