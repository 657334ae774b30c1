#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "morphdis/parameter.hpp"
#include "morphdis/rng.hpp"
#include "morphdis/tensor.hpp"

namespace morphdis {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while its graph lives.
struct Expr {
  Graph* graph = nullptr;
  std::uint32_t id = 0;

  const Tensor& value() const;
  double scalar() const;
  std::size_t size() const { return value().size(); }
};

// Eager reverse-mode tape. Every op computes its value immediately and
// records a closure that pushes the node's gradient to its arguments.
// Parameter nodes accumulate straight into Parameter::grad.
class Graph {
 public:
  // `rng` drives dropout masks; may be null when `training` is false.
  // With `record` false no gradients are tracked (inference).
  explicit Graph(bool training = false, Rng* rng = nullptr, bool record = true)
      : training_(training), record_(record), rng_(rng) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool training() const { return training_; }
  Rng* rng() const { return rng_; }

  Expr constant(Tensor value);
  Expr param(Parameter& p);
  Expr lookup(Parameter& table, std::size_t row);

  const Tensor& value(std::uint32_t id) const;
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  std::size_t node_count() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and runs the tape backwards. `loss` must be a
  // scalar; parameter gradients are accumulated (+=).
  void backward(Expr loss);

  // --- op construction (used by the free functions below) ---
  using Backprop = std::function<void(Graph&, std::uint32_t)>;
  Expr add_node(Tensor value, bool requires_grad, Backprop backprop);
  Tensor& grad(std::uint32_t id);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    const Tensor* ref = nullptr;  // parameter nodes alias the parameter value
    Parameter* param = nullptr;
    bool requires_grad = false;
    Backprop backprop;
  };

  bool training_;
  bool record_;
  Rng* rng_;
  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, std::uint32_t>> param_nodes_;
};

// y = W x for W [m x n], x [n].
Expr matvec(Expr w, Expr x);
// y = W^T x for W [m x n], x [m].
Expr matvec_t(Expr w, Expr x);
// y = W x + b
Expr affine(Expr w, Expr x, Expr b);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr cmul(Expr a, Expr b);
Expr scale(Expr a, double factor);
Expr sum(std::span<const Expr> items);
Expr mean(std::span<const Expr> scalars);

Expr sigmoid(Expr a);
Expr tanh(Expr a);

Expr concat(std::span<const Expr> parts);
Expr slice(Expr a, std::size_t begin, std::size_t length);
// Stacks equally sized vectors into a [n x d] matrix.
Expr stack_rows(std::span<const Expr> rows);
Expr dot(Expr a, Expr b);

Expr softmax(Expr logits);
// -log softmax(logits)[gold]
Expr pick_neg_log_softmax(Expr logits, std::size_t gold);

// Identity in the forward pass; blocks all gradient flow.
Expr detach(Expr a);
// Inverted dropout; the identity when the graph is not training or p == 0.
Expr dropout(Expr a, double p);

// Numeric helpers shared by ops and tests.
std::vector<double> softmax_values(std::span<const double> logits);
std::size_t argmax(std::span<const double> values);

}  // namespace morphdis
