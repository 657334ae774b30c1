#include "morphdis/layers.hpp"

#include <algorithm>

#include "morphdis/error.hpp"

namespace morphdis {

Linear Linear::create(ParameterStore& store, const std::string& name, std::size_t in,
                      std::size_t out, Rng& rng) {
  Linear l;
  l.weight = &store.add_matrix(name + ".W", out, in, rng);
  l.bias = &store.add_vector(name + ".b", out);
  return l;
}

Expr Linear::operator()(Graph& g, Expr x) const {
  return affine(g.param(*weight), x, g.param(*bias));
}

LstmCell LstmCell::create(ParameterStore& store, const std::string& name, std::size_t input_size,
                          std::size_t hidden_size, bool peephole, Rng& rng) {
  LstmCell cell;
  cell.w_x = &store.add_matrix(name + ".Wx", 4 * hidden_size, input_size, rng);
  cell.w_h = &store.add_matrix(name + ".Wh", 4 * hidden_size, hidden_size, rng);
  Tensor b({4 * hidden_size});
  for (std::size_t i = hidden_size; i < 2 * hidden_size; ++i) b[i] = 1.0;  // forget gate
  cell.bias = &store.add(name + ".b", std::move(b));
  if (peephole) {
    cell.peep_i = &store.add_vector(name + ".pi", hidden_size);
    cell.peep_f = &store.add_vector(name + ".pf", hidden_size);
    cell.peep_o = &store.add_vector(name + ".po", hidden_size);
  }
  return cell;
}

LstmState LstmCell::zero_state(Graph& g) const {
  Expr z = g.constant(Tensor({hidden_size()}));
  return {z, z};
}

LstmState LstmCell::step(Graph& g, Expr x, const LstmState& prev) const {
  const std::size_t hs = hidden_size();
  if (x.size() != input_size()) {
    throw ShapeError("lstm_step: input dimension " + std::to_string(x.size()) +
                     " does not match cell input size " + std::to_string(input_size()));
  }
  if (prev.h.size() != hs) {
    throw ShapeError("lstm_step: h_prev dimension " + std::to_string(prev.h.size()) +
                     " does not match hidden size " + std::to_string(hs));
  }
  if (prev.c.size() != hs) {
    throw ShapeError("lstm_step: c_prev dimension " + std::to_string(prev.c.size()) +
                     " does not match hidden size " + std::to_string(hs));
  }
  Expr gates = matvec(g.param(*w_x), x) + matvec(g.param(*w_h), prev.h) + g.param(*bias);
  Expr pre_i = slice(gates, 0, hs);
  Expr pre_f = slice(gates, hs, hs);
  Expr pre_g = slice(gates, 2 * hs, hs);
  Expr pre_o = slice(gates, 3 * hs, hs);
  if (has_peephole()) {
    pre_i = pre_i + cmul(g.param(*peep_i), prev.c);
    pre_f = pre_f + cmul(g.param(*peep_f), prev.c);
  }
  Expr c = cmul(sigmoid(pre_f), prev.c) + cmul(sigmoid(pre_i), tanh(pre_g));
  if (has_peephole()) pre_o = pre_o + cmul(g.param(*peep_o), c);
  Expr h = cmul(sigmoid(pre_o), tanh(c));
  return {h, c};
}

LstmStack LstmStack::create(ParameterStore& store, const std::string& name, std::size_t input_size,
                            std::size_t hidden_size, std::size_t num_layers, bool peephole,
                            Rng& rng) {
  LstmStack s;
  for (std::size_t l = 0; l < num_layers; ++l) {
    s.layers.push_back(LstmCell::create(store, name + ".l" + std::to_string(l),
                                        l == 0 ? input_size : hidden_size, hidden_size, peephole,
                                        rng));
  }
  return s;
}

std::vector<LstmState> LstmStack::zero_state(Graph& g) const {
  std::vector<LstmState> state;
  for (const auto& cell : layers) state.push_back(cell.zero_state(g));
  return state;
}

Expr LstmStack::step(Graph& g, Expr x, std::vector<LstmState>& state, double dropout_p) const {
  Expr input = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    state[l] = layers[l].step(g, dropout(input, dropout_p), state[l]);
    input = state[l].h;
  }
  return input;
}

std::vector<LstmState> LstmStack::run(Graph& g, std::span<const Expr> inputs,
                                      double dropout_p) const {
  if (inputs.empty()) throw ShapeError("lstm: empty input sequence");
  auto state = zero_state(g);
  for (const Expr& x : inputs) step(g, x, state, dropout_p);
  return state;
}

BiLstm BiLstm::create(ParameterStore& store, const std::string& name, std::size_t input_size,
                      std::size_t hidden_size, std::size_t num_layers, bool peephole, Rng& rng) {
  BiLstm b;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? input_size : 2 * hidden_size;
    const std::string prefix = name + ".l" + std::to_string(l);
    b.forward.push_back(LstmCell::create(store, prefix + ".fwd", in, hidden_size, peephole, rng));
    b.backward.push_back(LstmCell::create(store, prefix + ".bwd", in, hidden_size, peephole, rng));
  }
  return b;
}

BiLstmOutput BiLstm::run(Graph& g, std::span<const Expr> inputs, double dropout_p) const {
  if (inputs.empty()) throw ShapeError("bilstm_forward: empty input sequence");
  BiLstmOutput out;
  std::vector<Expr> layer_in(inputs.begin(), inputs.end());
  const std::size_t n = layer_in.size();
  for (std::size_t l = 0; l < forward.size(); ++l) {
    for (Expr& x : layer_in) x = dropout(x, dropout_p);
    std::vector<Expr> fwd(n), bwd(n);
    LstmState sf = forward[l].zero_state(g);
    for (std::size_t t = 0; t < n; ++t) {
      sf = forward[l].step(g, layer_in[t], sf);
      fwd[t] = sf.h;
    }
    LstmState sb = backward[l].zero_state(g);
    for (std::size_t t = n; t-- > 0;) {
      sb = backward[l].step(g, layer_in[t], sb);
      bwd[t] = sb.h;
    }
    out.finals.emplace_back(sf, sb);
    for (std::size_t t = 0; t < n; ++t) {
      const Expr pair[] = {fwd[t], bwd[t]};
      layer_in[t] = concat(pair);
    }
  }
  out.outputs = std::move(layer_in);
  return out;
}

Expr luong_attention(Expr weight, Expr state, Expr encoder_rows) {
  const Tensor& w = weight.value();
  const Tensor& rows = encoder_rows.value();
  if (rows.rank() != 2 || rows.rows() == 0) throw ShapeError("luong_score: no encoder outputs");
  if (w.rank() != 2 || w.rows() != state.size()) {
    throw ShapeError("luong_score: decoder state dimension " + std::to_string(state.size()) +
                     " does not match score matrix rows " + std::to_string(w.rows()));
  }
  if (w.cols() != rows.cols()) {
    throw ShapeError("luong_score: encoder output dimension " + std::to_string(rows.cols()) +
                     " does not match score matrix columns " + std::to_string(w.cols()));
  }
  Expr query = matvec_t(weight, state);
  return softmax(matvec(encoder_rows, query));
}

std::pair<Tensor, Tensor> lstm_step(const LstmCell& cell, const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev) {
  Graph g;
  LstmState s = cell.step(g, g.constant(x), {g.constant(h_prev), g.constant(c_prev)});
  return {s.h.value(), s.c.value()};
}

std::vector<Tensor> bilstm_forward(const BiLstm& layers, const std::vector<Tensor>& inputs) {
  if (inputs.empty()) throw ShapeError("bilstm_forward: empty input sequence");
  Graph g;
  std::vector<Expr> xs;
  for (const Tensor& t : inputs) xs.push_back(g.constant(t));
  BiLstmOutput out = layers.run(g, xs, 0.0);
  std::vector<Tensor> result;
  for (const Expr& e : out.outputs) result.push_back(e.value());
  return result;
}

SoftmaxXent softmax_xent(const Tensor& logits, std::size_t gold_index) {
  Graph g;
  Expr loss = pick_neg_log_softmax(g.constant(logits), gold_index);
  return {loss.scalar(), Tensor::vector(softmax_values(logits.data()))};
}

Tensor luong_score(const Tensor& weight, const Tensor& decoder_state,
                   const std::vector<Tensor>& encoder_outputs) {
  if (encoder_outputs.empty()) throw ShapeError("luong_score: no encoder outputs");
  Graph g;
  std::vector<Expr> rows;
  for (const Tensor& t : encoder_outputs) rows.push_back(g.constant(t));
  return luong_attention(g.constant(weight), g.constant(decoder_state), stack_rows(rows)).value();
}

}  // namespace morphdis
