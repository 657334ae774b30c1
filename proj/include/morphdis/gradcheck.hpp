#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "morphdis/parameter.hpp"

namespace morphdis {

struct GradCheckOptions {
  double step = 1e-5;                 // central-difference half width
  double denominator_floor = 1e-6;    // relative error uses max(|a|, |n|, floor)
  std::size_t max_entries_per_param = 64;  // random subsample above this size
  std::uint64_t seed = 7;
};

struct GradCheckEntry {
  std::string parameter;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_relative_error = 0.0;
  bool passed = false;
};

// Evaluates the model fragment's scalar loss. When `backprop` is true the
// callee runs the backward pass so that Parameter::grad holds d(loss)/d(p).
using ScalarLossFn = std::function<double(bool backprop)>;

// Compares analytic gradients against central differences for every entry
// of `params` (or a seeded subsample of large tensors). Passes iff the
// largest relative error is below `tolerance`.
GradCheckReport grad_check(std::span<Parameter* const> params, const ScalarLossFn& loss,
                           double tolerance, const GradCheckOptions& options = {});

}  // namespace morphdis
