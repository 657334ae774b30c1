#include "morphdis/parameter.hpp"

#include <cmath>

#include "morphdis/error.hpp"

namespace morphdis {

Parameter::Parameter(std::string n, Tensor v)
    : name(std::move(n)),
      value(std::move(v)),
      grad(Tensor::zeros_like(value)),
      adam_m(Tensor::zeros_like(value)),
      adam_v(Tensor::zeros_like(value)) {}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Parameter& ParameterStore::add(const std::string& name, Tensor value) {
  if (find(name) != nullptr) throw UsageError("duplicate parameter name '" + name + "'");
  params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
  return *params_.back();
}

Parameter& ParameterStore::add_matrix(const std::string& name, std::size_t rows, std::size_t cols,
                                      Rng& rng) {
  Tensor t({rows, cols});
  const double bound = glorot_bound(cols, rows);
  for (double& x : t.storage()) x = rng.uniform(-bound, bound);
  return add(name, std::move(t));
}

Parameter& ParameterStore::add_vector(const std::string& name, std::size_t size, double fill) {
  return add(name, Tensor({size}, fill));
}

Parameter* ParameterStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

Parameter& ParameterStore::at(const std::string& name) {
  Parameter* p = find(name);
  if (p == nullptr) throw UsageError("unknown parameter '" + name + "'");
  return *p;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

}  // namespace morphdis
