#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "morphdis/checkpoint.hpp"
#include "morphdis/metrics.hpp"

namespace morphdis {

struct TrainConfig {
  ModelConfig model;
  std::size_t epochs = 50;
  double learning_rate = 0.0005;
  double tune_fraction = 0.05;
  std::uint64_t seed = 1;
  double sampling_probability = 0.4;
  double clip_norm = 5.0;  // 0 disables clipping
  std::size_t beam_width = 5;       // final tune metrics
  std::size_t tune_beam_width = 1;  // per-epoch selection
  bool gold_tag_conditioning = false;  // ablation: feed gold tags to the decoders
  bool dual_optimizer = false;         // ablation: separate rate for the lexical side
  double lexical_learning_rate = 0.0005;

  void validate() const;
  // Training keys only; the architecture echo is ModelConfig::to_key_values.
  KeyValues to_key_values() const;
  // Reads training and model keys from `kv`, erasing them.
  static TrainConfig take(KeyValues& kv);
};

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;  // 1-based within the epoch
  std::array<double, kNumFeatures> components{};
  double total = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::array<double, kNumFeatures> loss{};  // mean over the epoch's sentences
  double total = 0.0;
  MetricsReport tune;
  double seconds = 0.0;

  // Deterministic one-line rendering (no timing).
  std::string line() const;
};

struct TrainOptions {
  Normalizer normalizer = Normalizer::arabic_default();
  std::string embeddings_path;  // optional pretrained word vectors
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  Checkpoint checkpoint;  // live parameters are the last epoch's; best holds the selection
  std::vector<EpochRecord> epochs;  // epochs run by this call
  MetricsReport final_tune;         // best parameters, configured beam
  double wall_seconds = 0.0;

  std::string summary_json() const;
};

// Runs greedy/beam inference over `corpus` and returns the predicted
// analyses (raw model output) in corpus order.
std::vector<Analysis> predict_corpus(const JointModel& model, const Corpus& corpus,
                                     const MorphDictionary* dictionary, const DecodeConfig& decode);
MetricsReport evaluate_model(const JointModel& model, const Corpus& corpus,
                             const MorphDictionary* dictionary, const DecodeConfig& decode);

TrainResult train(const TrainConfig& config, const Corpus& corpus, const MorphDictionary* dictionary,
                  const TrainOptions& options = {});

// Continues `checkpoint` up to config.epochs. The corpus must rebuild the
// checkpoint's vocabularies exactly and the architecture must match.
TrainResult resume(Checkpoint checkpoint, const TrainConfig& config, const Corpus& corpus,
                   const MorphDictionary* dictionary, const TrainOptions& options = {});

}  // namespace morphdis
