#include "morphdis/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "morphdis/error.hpp"

namespace morphdis {

const Tensor& Expr::value() const { return graph->value(id); }

double Expr::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw ShapeError("expected scalar, got shape " + v.shape_string());
  return v[0];
}

Expr Graph::constant(Tensor value) { return add_node(std::move(value), false, nullptr); }

Expr Graph::param(Parameter& p) {
  for (const auto& [ptr, id] : param_nodes_) {
    if (ptr == &p) return Expr{this, id};
  }
  Node n;
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  param_nodes_.emplace_back(&p, id);
  return Expr{this, id};
}

Expr Graph::lookup(Parameter& table, std::size_t row) {
  const Tensor& t = table.value;
  if (t.rank() != 2) throw ShapeError("lookup table '" + table.name + "' must be a matrix");
  if (row >= t.rows()) {
    throw ShapeError("lookup row " + std::to_string(row) + " out of range for '" + table.name +
                     "' with " + std::to_string(t.rows()) + " rows");
  }
  const std::size_t width = t.cols();
  std::vector<double> data(t.storage().begin() + static_cast<std::ptrdiff_t>(row * width),
                           t.storage().begin() + static_cast<std::ptrdiff_t>((row + 1) * width));
  Parameter* tp = &table;
  return add_node(Tensor::vector(std::move(data)), record_, [tp, row, width](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    double* dst = tp->grad.storage().data() + row * width;
    for (std::size_t i = 0; i < width; ++i) dst[i] += gy[i];
  });
}

const Tensor& Graph::value(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.ref != nullptr ? *n.ref : n.value;
}

Tensor& Graph::grad(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.param != nullptr) return n.param->grad;
  if (n.grad.empty()) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

Expr Graph::add_node(Tensor value, bool requires_grad, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Expr{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Graph::backward(Expr loss) {
  if (loss.graph != this) throw UsageError("backward called with a node of another graph");
  if (value(loss.id).size() != 1) throw ShapeError("backward requires a scalar loss");
  if (!std::isfinite(value(loss.id)[0])) throw NumericError("non-finite loss in backward");
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss.id)[0] += 1.0;
  for (std::uint32_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backprop) continue;
    if (n.param == nullptr && n.grad.empty()) continue;  // nothing flowed here
    n.backprop(*this, i);
  }
}

namespace {

void require_same_graph(Expr a, Expr b) {
  if (a.graph != b.graph) throw UsageError("expressions belong to different graphs");
}

void require_same_size(const Tensor& a, const Tensor& b, const char* op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": operand sizes differ (" + a.shape_string() + " vs " +
                     b.shape_string() + ")");
  }
}

}  // namespace

namespace {

// Four interleaved partial sums, combined in a fixed order.
double dot_product(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

Expr matvec(Expr w, Expr x) {
  require_same_graph(w, x);
  Graph& g = *w.graph;
  const Tensor& W = w.value();
  const Tensor& X = x.value();
  if (W.rank() != 2) throw ShapeError("matvec: weight must be a matrix, got " + W.shape_string());
  const std::size_t m = W.rows(), n = W.cols();
  if (X.size() != n) {
    throw ShapeError("matvec: input dimension " + std::to_string(X.size()) +
                     " does not match weight columns " + std::to_string(n));
  }
  Tensor y({m});
  const double* wp = W.storage().data();
  const double* xp = X.storage().data();
  for (std::size_t r = 0; r < m; ++r) y[r] = dot_product(wp + r * n, xp, n);
  const bool rg = g.requires_grad(w.id) || g.requires_grad(x.id);
  const auto wid = w.id, xid = x.id;
  return g.add_node(std::move(y), rg, [wid, xid, m, n](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const double* wp = g.value(wid).storage().data();
    const double* xp = g.value(xid).storage().data();
    if (g.requires_grad(wid)) {
      double* gw = g.grad(wid).storage().data();
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = gy[r];
        if (gr == 0.0) continue;
        double* row = gw + r * n;
        for (std::size_t c = 0; c < n; ++c) row[c] += gr * xp[c];
      }
    }
    if (g.requires_grad(xid)) {
      double* gx = g.grad(xid).storage().data();
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = gy[r];
        if (gr == 0.0) continue;
        const double* row = wp + r * n;
        for (std::size_t c = 0; c < n; ++c) gx[c] += gr * row[c];
      }
    }
  });
}

Expr matvec_t(Expr w, Expr x) {
  require_same_graph(w, x);
  Graph& g = *w.graph;
  const Tensor& W = w.value();
  const Tensor& X = x.value();
  if (W.rank() != 2) throw ShapeError("matvec_t: weight must be a matrix, got " + W.shape_string());
  const std::size_t m = W.rows(), n = W.cols();
  if (X.size() != m) {
    throw ShapeError("matvec_t: input dimension " + std::to_string(X.size()) +
                     " does not match weight rows " + std::to_string(m));
  }
  Tensor y({n});
  for (std::size_t r = 0; r < m; ++r) {
    const double xr = X[r];
    for (std::size_t c = 0; c < n; ++c) y[c] += W.at(r, c) * xr;
  }
  const bool rg = g.requires_grad(w.id) || g.requires_grad(x.id);
  const auto wid = w.id, xid = x.id;
  return g.add_node(std::move(y), rg, [wid, xid, m, n](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& W = g.value(wid);
    const Tensor& X = g.value(xid);
    if (g.requires_grad(wid)) {
      Tensor& gw = g.grad(wid);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) gw.at(r, c) += X[r] * gy[c];
      }
    }
    if (g.requires_grad(xid)) {
      Tensor& gx = g.grad(xid);
      for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += W.at(r, c) * gy[c];
        gx[r] += acc;
      }
    }
  });
}

Expr affine(Expr w, Expr x, Expr b) { return matvec(w, x) + b; }

Expr operator+(Expr a, Expr b) {
  require_same_graph(a, b);
  Graph& g = *a.graph;
  require_same_size(a.value(), b.value(), "add");
  Tensor y = a.value();
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += B[i];
  const bool rg = g.requires_grad(a.id) || g.requires_grad(b.id);
  const auto aid = a.id, bid = b.id;
  return g.add_node(std::move(y), rg, [aid, bid](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    for (auto id : {aid, bid}) {
      if (!g.requires_grad(id)) continue;
      Tensor& gx = g.grad(id);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    }
  });
}

Expr operator-(Expr a, Expr b) { return a + scale(b, -1.0); }

Expr cmul(Expr a, Expr b) {
  require_same_graph(a, b);
  Graph& g = *a.graph;
  require_same_size(a.value(), b.value(), "cmul");
  Tensor y = a.value();
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= B[i];
  const bool rg = g.requires_grad(a.id) || g.requires_grad(b.id);
  const auto aid = a.id, bid = b.id;
  return g.add_node(std::move(y), rg, [aid, bid](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    if (g.requires_grad(aid)) {
      const Tensor& B = g.value(bid);
      Tensor& ga = g.grad(aid);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * B[i];
    }
    if (g.requires_grad(bid)) {
      const Tensor& A = g.value(aid);
      Tensor& gb = g.grad(bid);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * A[i];
    }
  });
}

Expr scale(Expr a, double factor) {
  Graph& g = *a.graph;
  Tensor y = a.value();
  for (double& v : y.storage()) v *= factor;
  const auto aid = a.id;
  return g.add_node(std::move(y), g.requires_grad(a.id), [aid, factor](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad(aid);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * factor;
  });
}

Expr sum(std::span<const Expr> items) {
  if (items.empty()) throw ShapeError("sum of an empty list");
  Graph& g = *items.front().graph;
  Tensor y = items.front().value();
  bool rg = g.requires_grad(items.front().id);
  std::vector<std::uint32_t> ids{items.front().id};
  for (std::size_t k = 1; k < items.size(); ++k) {
    require_same_graph(items.front(), items[k]);
    const Tensor& v = items[k].value();
    require_same_size(y, v, "sum");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += v[i];
    rg = rg || g.requires_grad(items[k].id);
    ids.push_back(items[k].id);
  }
  return g.add_node(std::move(y), rg, [ids = std::move(ids)](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    for (auto id : ids) {
      if (!g.requires_grad(id)) continue;
      Tensor& gx = g.grad(id);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    }
  });
}

Expr mean(std::span<const Expr> scalars) {
  if (scalars.empty()) throw ShapeError("mean of an empty list");
  return scale(sum(scalars), 1.0 / static_cast<double>(scalars.size()));
}

Expr sigmoid(Expr a) {
  Graph& g = *a.graph;
  Tensor y = a.value();
  for (double& v : y.storage()) v = 1.0 / (1.0 + std::exp(-v));
  const auto aid = a.id;
  return g.add_node(std::move(y), g.requires_grad(a.id), [aid](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    Tensor& ga = g.grad(aid);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * y[i] * (1.0 - y[i]);
  });
}

Expr tanh(Expr a) {
  Graph& g = *a.graph;
  Tensor y = a.value();
  for (double& v : y.storage()) v = std::tanh(v);
  const auto aid = a.id;
  return g.add_node(std::move(y), g.requires_grad(a.id), [aid](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    Tensor& ga = g.grad(aid);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * (1.0 - y[i] * y[i]);
  });
}

Expr concat(std::span<const Expr> parts) {
  if (parts.empty()) throw ShapeError("concat of an empty list");
  Graph& g = *parts.front().graph;
  std::vector<double> data;
  std::vector<std::pair<std::uint32_t, std::size_t>> pieces;  // id, offset
  bool rg = false;
  for (const Expr& p : parts) {
    require_same_graph(parts.front(), p);
    const Tensor& v = p.value();
    pieces.emplace_back(p.id, data.size());
    data.insert(data.end(), v.storage().begin(), v.storage().end());
    rg = rg || g.requires_grad(p.id);
  }
  return g.add_node(Tensor::vector(std::move(data)), rg,
                    [pieces = std::move(pieces)](Graph& g, std::uint32_t self) {
                      const Tensor& gy = g.grad(self);
                      for (const auto& [id, off] : pieces) {
                        if (!g.requires_grad(id)) continue;
                        Tensor& gx = g.grad(id);
                        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[off + i];
                      }
                    });
}

Expr slice(Expr a, std::size_t begin, std::size_t length) {
  Graph& g = *a.graph;
  const Tensor& v = a.value();
  if (begin + length > v.size() || length == 0) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                     ") out of range for size " + std::to_string(v.size()));
  }
  std::vector<double> data(v.storage().begin() + static_cast<std::ptrdiff_t>(begin),
                           v.storage().begin() + static_cast<std::ptrdiff_t>(begin + length));
  const auto aid = a.id;
  return g.add_node(Tensor::vector(std::move(data)), g.requires_grad(a.id),
                    [aid, begin](Graph& g, std::uint32_t self) {
                      const Tensor& gy = g.grad(self);
                      Tensor& ga = g.grad(aid);
                      for (std::size_t i = 0; i < gy.size(); ++i) ga[begin + i] += gy[i];
                    });
}

Expr stack_rows(std::span<const Expr> rows) {
  if (rows.empty()) throw ShapeError("stack_rows of an empty list");
  Graph& g = *rows.front().graph;
  const std::size_t width = rows.front().value().size();
  std::vector<double> data;
  data.reserve(width * rows.size());
  std::vector<std::uint32_t> ids;
  bool rg = false;
  for (const Expr& r : rows) {
    require_same_graph(rows.front(), r);
    const Tensor& v = r.value();
    if (v.size() != width) {
      throw ShapeError("stack_rows: row width " + std::to_string(v.size()) + " differs from " +
                       std::to_string(width));
    }
    data.insert(data.end(), v.storage().begin(), v.storage().end());
    ids.push_back(r.id);
    rg = rg || g.requires_grad(r.id);
  }
  Tensor y({rows.size(), width}, std::move(data));
  return g.add_node(std::move(y), rg, [ids = std::move(ids), width](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (!g.requires_grad(ids[r])) continue;
      Tensor& gx = g.grad(ids[r]);
      for (std::size_t i = 0; i < width; ++i) gx[i] += gy[r * width + i];
    }
  });
}

Expr dot(Expr a, Expr b) {
  require_same_graph(a, b);
  Graph& g = *a.graph;
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_same_size(A, B, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += A[i] * B[i];
  const bool rg = g.requires_grad(a.id) || g.requires_grad(b.id);
  const auto aid = a.id, bid = b.id;
  return g.add_node(Tensor::vector({acc}), rg, [aid, bid](Graph& g, std::uint32_t self) {
    const double gy = g.grad(self)[0];
    if (g.requires_grad(aid)) {
      const Tensor& B = g.value(bid);
      Tensor& ga = g.grad(aid);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy * B[i];
    }
    if (g.requires_grad(bid)) {
      const Tensor& A = g.value(aid);
      Tensor& gb = g.grad(bid);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy * A[i];
    }
  });
}

std::vector<double> softmax_values(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("softmax over an empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ShapeError("argmax over an empty vector");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Expr softmax(Expr logits) {
  Graph& g = *logits.graph;
  Tensor y = Tensor::vector(softmax_values(logits.value().data()));
  const auto lid = logits.id;
  return g.add_node(std::move(y), g.requires_grad(logits.id), [lid](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) inner += gy[i] * y[i];
    Tensor& gl = g.grad(lid);
    for (std::size_t i = 0; i < y.size(); ++i) gl[i] += y[i] * (gy[i] - inner);
  });
}

Expr pick_neg_log_softmax(Expr logits, std::size_t gold) {
  Graph& g = *logits.graph;
  const Tensor& l = logits.value();
  if (gold >= l.size()) {
    throw ShapeError("gold index " + std::to_string(gold) + " out of range for " +
                     std::to_string(l.size()) + " classes");
  }
  const double mx = *std::max_element(l.storage().begin(), l.storage().end());
  double z = 0.0;
  for (double v : l.storage()) z += std::exp(v - mx);
  const double loss = -(l[gold] - mx - std::log(z));
  const auto lid = logits.id;
  return g.add_node(Tensor::vector({loss}), g.requires_grad(logits.id),
                    [lid, gold](Graph& g, std::uint32_t self) {
                      const double gy = g.grad(self)[0];
                      const std::vector<double> p = softmax_values(g.value(lid).data());
                      Tensor& gl = g.grad(lid);
                      for (std::size_t i = 0; i < p.size(); ++i) {
                        gl[i] += gy * (p[i] - (i == gold ? 1.0 : 0.0));
                      }
                    });
}

Expr detach(Expr a) { return a.graph->constant(a.value()); }

Expr dropout(Expr a, double p) {
  Graph& g = *a.graph;
  if (!g.training() || p <= 0.0) return a;
  if (p >= 1.0) throw UsageError("dropout probability must be < 1");
  if (g.rng() == nullptr) throw UsageError("training graph without a random generator");
  const double keep = 1.0 - p;
  std::vector<double> mask(a.size());
  for (double& m : mask) m = g.rng()->bernoulli(keep) ? 1.0 / keep : 0.0;
  return cmul(a, g.constant(Tensor::vector(std::move(mask))));
}

}  // namespace morphdis
