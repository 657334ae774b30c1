#pragma once

#include <array>
#include <span>
#include <vector>

#include "morphdis/analyzer.hpp"
#include "morphdis/graph.hpp"
#include "morphdis/layers.hpp"
#include "morphdis/model_config.hpp"
#include "morphdis/vocab.hpp"

namespace morphdis {

// Candidate tag ids per feature for one word (values unknown to the tag
// vocabulary are dropped).
using CandidateIds = std::array<std::vector<std::size_t>, kNumTags>;
using TagIds = std::array<std::size_t, kNumTags>;

CandidateIds candidate_ids(const CandidateTagSets& sets, const Vocab& vocab);

// Tagger input for one word: word id, character ids and analyzer candidates.
struct TaggerToken {
  std::size_t word = kWordUnk;
  std::vector<std::size_t> chars;
  CandidateIds candidates;
};

// Word-level multitask tagger. The character and word embedding tables are
// owned by the joint model and shared with the encoder.
class Tagger {
 public:
  Tagger() = default;
  Tagger(ParameterStore& store, const ModelConfig& config, const Vocab& vocab, Parameter& char_emb,
         Parameter& word_emb, Rng& rng);

  // s_j: last top-layer state of the character LSTM over the word.
  Expr char_summary(Graph& g, std::span<const std::size_t> chars) const;
  // a_j: per feature, the sum of candidate value embeddings; concatenated
  // in schema order. Features with no candidates contribute zeros.
  Expr candidate_embedding(Graph& g, const CandidateIds& candidates) const;
  // v_j = [w_j; s_j; a_j], or [w_j; s_j] without an analyzer.
  Expr token_representation(Graph& g, const TaggerToken& token) const;

  // Per token, per feature logits over that feature's tag vocabulary.
  std::vector<std::array<Expr, kNumTags>> forward(Graph& g, std::span<const TaggerToken> tokens) const;

  // t_hat_j: concatenated embeddings of the given tag ids, detached so that
  // no gradient reaches the tagger or its tables.
  Expr tag_conditioning(Graph& g, const TagIds& ids) const;
  std::size_t conditioning_size() const { return kNumTags * config_.tag_dim; }

  std::vector<Parameter*> parameters() const;  // excludes the shared embeddings

 private:
  ModelConfig config_;
  Parameter* char_emb_ = nullptr;
  Parameter* word_emb_ = nullptr;
  LstmStack char_lstm_;
  std::array<Parameter*, kNumTags> tag_emb_{};
  BiLstm context_;
  std::array<Linear, kNumTags> hidden_{};
  std::array<Linear, kNumTags> output_{};
  std::vector<Parameter*> owned_;
};

struct TagPrediction {
  std::array<std::vector<double>, kNumTags> distributions;
  TagIds ids{};
  std::array<std::string, kNumTags> values;
};

TagPrediction predict_tags(const std::array<Expr, kNumTags>& logits, const Vocab& vocab);

// Cross-entropy per feature, averaged over tokens: result[f] is the loss of
// feature f. `gold[t][f]` must be a valid id of feature f.
std::array<Expr, kNumTags> tagger_loss(const std::vector<std::array<Expr, kNumTags>>& logits,
                                       std::span<const TagIds> gold);

}  // namespace morphdis
