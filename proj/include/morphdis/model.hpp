#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morphdis/analyzer.hpp"
#include "morphdis/lexdec.hpp"
#include "morphdis/model_config.hpp"
#include "morphdis/normalizer.hpp"
#include "morphdis/tagger.hpp"
#include "morphdis/vocab.hpp"

namespace morphdis {

struct PreparedToken {
  std::string surface;      // normalized
  TaggerToken tagger;
  CharWindow window;
  std::size_t target_length = 0;  // code points
  bool oov = false;               // unknown to the dictionary
  std::optional<TagIds> gold_tags;
  std::optional<std::vector<std::size_t>> gold_lemma;  // output ids, no EOS
  std::optional<std::vector<std::size_t>> gold_diac;
};

struct PreparedSentence {
  std::vector<PreparedToken> tokens;
  std::vector<TagIds> gold_tags() const;
};

struct TokenPrediction {
  TagPrediction tags;
  DecodeResult lemma;
  DecodeResult diac;
  std::string lemma_text;
  std::string diac_text;
  bool oov = false;

  // Analysis assembled verbatim from the raw predictions.
  Analysis analysis() const;
};

// All trainable parameters plus the vocabularies they are indexed by.
class JointModel {
 public:
  JointModel(ModelConfig config, Vocab vocab, Normalizer normalizer, std::uint64_t seed);
  JointModel(const JointModel&) = delete;
  JointModel& operator=(const JointModel&) = delete;

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const Normalizer& normalizer() const { return normalizer_; }
  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }
  Parameter& char_embeddings() const { return *char_emb_; }
  Parameter& word_embeddings() const { return *word_emb_; }
  const Tagger& tagger() const { return tagger_; }
  const Encoder& encoder() const { return encoder_; }
  const Decoder& decoder(std::size_t lexical_feature) const {
    return lexical_feature == kLemmaFeature ? lemma_decoder_ : diac_decoder_;
  }
  // Mixing logits for the learned loss-weighting ablation; null by default.
  Parameter* loss_weight_logits() const { return loss_logits_; }

  // Normalizes surfaces, builds windows, looks up candidates. With
  // `require_gold`, gold values unknown to the vocabularies are errors;
  // otherwise they are left unset.
  PreparedSentence prepare(const Sentence& sentence, const MorphDictionary* dictionary,
                           bool require_gold) const;

  struct LossOptions {
    double sampling_probability = 0.0;
    bool gold_tag_conditioning = false;
    Rng* rng = nullptr;
  };
  // The 16 per-feature losses of one sentence: 14 tag losses (averaged over
  // tokens), then lemma and diac decoder losses (averaged over tokens).
  std::array<Expr, kNumFeatures> losses(Graph& g, const PreparedSentence& sentence,
                                        const LossOptions& options) const;

  std::vector<TokenPrediction> predict(const PreparedSentence& sentence,
                                       const DecodeConfig& decode) const;

 private:
  ModelConfig config_;
  Vocab vocab_;
  Normalizer normalizer_;
  ParameterStore store_;
  Parameter* char_emb_ = nullptr;
  Parameter* word_emb_ = nullptr;
  Tagger tagger_;
  Encoder encoder_;
  Decoder lemma_decoder_;
  Decoder diac_decoder_;
  Parameter* loss_logits_ = nullptr;
};

// Unweighted mean of the component losses.
Expr joint_loss(std::span<const Expr> components);
// Softmax-weighted combination (ablation only).
Expr weighted_joint_loss(Graph& g, std::span<const Expr> components, Parameter& logits);

}  // namespace morphdis
