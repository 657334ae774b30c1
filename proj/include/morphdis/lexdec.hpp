#pragma once

#include <optional>
#include <span>
#include <vector>

#include "morphdis/graph.hpp"
#include "morphdis/layers.hpp"
#include "morphdis/model_config.hpp"
#include "morphdis/vocab.hpp"

namespace morphdis {

struct EncoderOutput {
  std::vector<Expr> outputs;  // h_i, one per window position
  Expr rows;                  // outputs stacked as [n x 2H]
  std::vector<std::pair<LstmState, LstmState>> finals;  // per layer
};

// Bidirectional character encoder over a context window; each position
// reads [c_i; w_j] from the shared embedding tables.
class Encoder {
 public:
  Encoder() = default;
  Encoder(ParameterStore& store, const ModelConfig& config, Parameter& char_emb, Parameter& word_emb,
          Rng& rng);

  EncoderOutput encode(Graph& g, const CharWindow& window) const;
  std::size_t output_size() const { return bilstm_.output_size(); }
  std::vector<Parameter*> parameters() const { return owned_; }

 private:
  ModelConfig config_;
  Parameter* char_emb_ = nullptr;
  Parameter* word_emb_ = nullptr;
  BiLstm bilstm_;
  std::vector<Parameter*> owned_;
};

// One attention decoder. Step input is [previous output char embedding;
// previous attention context; t_hat]; Luong general attention over the
// encoder outputs; output = W_o tanh(W_c [h_top; context]).
class Decoder {
 public:
  struct State {
    std::vector<LstmState> layers;
    Expr context;
    std::size_t steps = 0;
  };
  struct Step {
    Expr logits;
    Expr attention;
  };

  Decoder() = default;
  Decoder(ParameterStore& store, const std::string& name, const ModelConfig& config,
          std::size_t output_vocab, std::size_t encoder_size, std::size_t conditioning_size, Rng& rng);

  // Decoder layer l starts from tanh(B_l [fwd_final_l; bwd_final_l]), c = 0.
  State initial_state(Graph& g, const EncoderOutput& enc) const;
  // Feeds `prev_symbol` (an output id, or bos()) and advances the state.
  Step step(Graph& g, const EncoderOutput& enc, State& state, std::size_t prev_symbol,
            const std::optional<Expr>& conditioning) const;

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t bos() const { return vocab_size_; }
  std::vector<Parameter*> parameters() const { return owned_; }

 private:
  ModelConfig config_;
  std::size_t vocab_size_ = 0;
  std::size_t conditioning_size_ = 0;
  Parameter* embedding_ = nullptr;  // vocab_size + 1 rows; the last is BOS
  std::vector<Linear> bridge_;
  LstmStack lstm_;
  Parameter* attention_ = nullptr;
  Linear combine_;
  Linear output_;
  std::vector<Parameter*> owned_;
};

struct DecodeTrace {
  std::vector<Tensor> logits;
  std::vector<Tensor> attention;
  std::vector<std::size_t> fed;      // symbol fed at each step
  std::vector<std::size_t> targets;  // gold symbol at each step (EOS last)
};

// Mean per-step cross-entropy of the gold sequence (EOS appended). At each
// step after the first, with probability `sampling_probability` the
// previous step's argmax is fed instead of the gold character.
Expr decode_train(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                  const std::optional<Expr>& conditioning, std::span<const std::size_t> gold,
                  double sampling_probability, Rng* rng, DecodeTrace* trace = nullptr);

struct DecodeResult {
  std::vector<std::size_t> ids;  // without EOS
  double log_prob = 0.0;
  double score = 0.0;            // log_prob / (emitted symbols incl. EOS)
  bool truncated = false;
};

// Argmax decoding; ties go to the lowest id.
DecodeResult decode_greedy(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                           const std::optional<Expr>& conditioning, std::size_t max_length);

// Length-normalized beam search. Candidates are ranked by score, ties by
// lexicographic id sequence. The greedy hypothesis is always a contender,
// so a wider beam never returns a lower score than width 1.
DecodeResult decode_beam(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                         const std::optional<Expr>& conditioning, std::size_t beam_width,
                         std::size_t max_length);

// Strict ordering used for every tie-break: higher score first, then the
// lexicographically smaller id sequence.
bool better_result(const DecodeResult& a, const DecodeResult& b);

std::string ids_to_string(std::span<const std::size_t> ids, const StringIndex& alphabet);

}  // namespace morphdis
