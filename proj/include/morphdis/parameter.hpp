#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "morphdis/rng.hpp"
#include "morphdis/tensor.hpp"

namespace morphdis {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;
  std::uint64_t step_count = 0;

  Parameter(std::string n, Tensor v);
  void zero_grad() { grad.fill(0.0); }
};

// Owns every trainable tensor of a model. Insertion order is the canonical
// order for checkpoints, optimizer sweeps and gradient-norm sums.
class ParameterStore {
 public:
  // Weights uniform in +-sqrt(6/(fan_in+fan_out)); for rank-1 tensors the
  // tensor is filled with `bias_fill` instead.
  Parameter& add_matrix(const std::string& name, std::size_t rows, std::size_t cols, Rng& rng);
  Parameter& add_vector(const std::string& name, std::size_t size, double fill = 0.0);
  Parameter& add(const std::string& name, Tensor value);

  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  Parameter& at(const std::string& name);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  std::size_t scalar_count() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

double glorot_bound(std::size_t fan_in, std::size_t fan_out);

}  // namespace morphdis
