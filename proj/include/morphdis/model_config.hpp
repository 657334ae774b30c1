#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "morphdis/analyzer.hpp"

namespace morphdis {

using KeyValues = std::map<std::string, std::string>;

// Architecture hyperparameters. Defaults are the full-size setup; the
// shipped micro configuration shrinks every width.
struct ModelConfig {
  std::size_t char_dim = 50;
  std::size_t word_dim = 250;
  std::size_t char_hidden = 100;
  std::size_t char_layers = 2;
  std::size_t tag_dim = 50;          // per-feature candidate/predicted tag embedding
  std::size_t tagger_hidden = 800;   // per direction
  std::size_t tagger_layers = 2;
  std::size_t head_hidden = 100;     // per-feature tanh layer before the softmax
  std::size_t encoder_hidden = 400;  // per direction
  std::size_t encoder_layers = 2;
  std::size_t decoder_hidden = 400;
  std::size_t decoder_layers = 2;
  double dropout = 0.4;
  std::size_t window = 10;
  bool use_analyzer = true;          // include a_j in the tagger input
  bool tag_conditioning = true;      // feed predicted tags to the decoders
  bool tag_every_step = true;        // false: only at the first decoder step
  OovPolicy oov_policy = OovPolicy::all_values;
  bool learned_loss_weights = false;  // ablation: softmax-weighted feature losses

  void validate() const;
  KeyValues to_key_values() const;
  // Reads known keys from `kv`, erasing them; leaves unknown keys in place.
  static ModelConfig take(KeyValues& kv);
};

struct DecodeConfig {
  std::size_t beam_width = 5;
  std::size_t max_output_length = 0;  // 0: 4 x target length + 8

  std::size_t max_length_for(std::size_t target_length) const {
    return max_output_length > 0 ? max_output_length : 4 * target_length + 8;
  }
};

// Helpers for the key=value echo used by configs and checkpoints.
std::string format_double(double v);
double parse_double_value(const std::string& key, const std::string& value);
std::size_t parse_size_value(const std::string& key, const std::string& value);
bool parse_bool_value(const std::string& key, const std::string& value);

}  // namespace morphdis
