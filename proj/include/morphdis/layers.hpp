#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphdis/graph.hpp"
#include "morphdis/parameter.hpp"

namespace morphdis {

struct Linear {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;

  static Linear create(ParameterStore& store, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng);
  std::size_t input_size() const { return weight->value.cols(); }
  std::size_t output_size() const { return weight->value.rows(); }
  Expr operator()(Graph& g, Expr x) const;
};

struct LstmState {
  Expr h;
  Expr c;
};

// One LSTM layer. Gate rows of the stacked weights are ordered
// [input, forget, candidate, output]. Peephole vectors are optional.
struct LstmCell {
  Parameter* w_x = nullptr;
  Parameter* w_h = nullptr;
  Parameter* bias = nullptr;
  Parameter* peep_i = nullptr;
  Parameter* peep_f = nullptr;
  Parameter* peep_o = nullptr;

  static LstmCell create(ParameterStore& store, const std::string& name, std::size_t input_size,
                         std::size_t hidden_size, bool peephole, Rng& rng);

  std::size_t input_size() const { return w_x->value.cols(); }
  std::size_t hidden_size() const { return w_h->value.cols(); }
  bool has_peephole() const { return peep_i != nullptr; }

  LstmState zero_state(Graph& g) const;
  LstmState step(Graph& g, Expr x, const LstmState& prev) const;
};

// Unidirectional stack; dropout is applied to the input of every layer.
struct LstmStack {
  std::vector<LstmCell> layers;

  static LstmStack create(ParameterStore& store, const std::string& name, std::size_t input_size,
                          std::size_t hidden_size, std::size_t num_layers, bool peephole, Rng& rng);
  std::size_t hidden_size() const { return layers.back().hidden_size(); }

  std::vector<LstmState> zero_state(Graph& g) const;
  // Advances every layer by one position; returns the top-layer output.
  Expr step(Graph& g, Expr x, std::vector<LstmState>& state, double dropout_p) const;
  // Runs over a sequence from the zero state and returns the final state.
  std::vector<LstmState> run(Graph& g, std::span<const Expr> inputs, double dropout_p) const;
};

struct BiLstmOutput {
  std::vector<Expr> outputs;                              // [forward; backward] of the top layer
  std::vector<std::pair<LstmState, LstmState>> finals;    // per layer: forward end, backward end
};

struct BiLstm {
  std::vector<LstmCell> forward;
  std::vector<LstmCell> backward;

  static BiLstm create(ParameterStore& store, const std::string& name, std::size_t input_size,
                       std::size_t hidden_size, std::size_t num_layers, bool peephole, Rng& rng);
  std::size_t hidden_size() const { return forward.back().hidden_size(); }
  std::size_t output_size() const { return 2 * hidden_size(); }

  BiLstmOutput run(Graph& g, std::span<const Expr> inputs, double dropout_p) const;
};

// Multiplicative ("general") attention weights softmax_i(state^T W h_i)
// over the rows of `encoder_rows` [n x d_enc]; W is [d_state x d_enc].
Expr luong_attention(Expr weight, Expr state, Expr encoder_rows);

// --- Tensor-level conveniences (each runs on a private graph) ---

std::pair<Tensor, Tensor> lstm_step(const LstmCell& cell, const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev);
std::vector<Tensor> bilstm_forward(const BiLstm& layers, const std::vector<Tensor>& inputs);

struct SoftmaxXent {
  double loss = 0.0;
  Tensor prob;
};
SoftmaxXent softmax_xent(const Tensor& logits, std::size_t gold_index);

Tensor luong_score(const Tensor& weight, const Tensor& decoder_state,
                   const std::vector<Tensor>& encoder_outputs);

}  // namespace morphdis
