#include "morphdis/model_config.hpp"

#include <charconv>
#include <cstdio>

#include "morphdis/error.hpp"

namespace morphdis {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double_value(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

std::size_t parse_size_value(const std::string& key, const std::string& value) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool parse_bool_value(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw UsageError("config key '" + key + "': expected on/off, got '" + value + "'");
}

void ModelConfig::validate() const {
  const std::pair<const char*, std::size_t> sizes[] = {
      {"char_dim", char_dim},         {"word_dim", word_dim},
      {"char_hidden", char_hidden},   {"char_layers", char_layers},
      {"tag_dim", tag_dim},           {"tagger_hidden", tagger_hidden},
      {"tagger_layers", tagger_layers}, {"head_hidden", head_hidden},
      {"encoder_hidden", encoder_hidden}, {"encoder_layers", encoder_layers},
      {"decoder_hidden", decoder_hidden}, {"decoder_layers", decoder_layers}};
  for (const auto& [name, v] : sizes) {
    if (v == 0) throw UsageError(std::string("config key '") + name + "' must be positive");
  }
  if (encoder_layers != decoder_layers) {
    throw UsageError("decoder_layers must equal encoder_layers (decoder layers start from the "
                     "matching encoder layer's final state)");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must lie in [0, 1)");
}

KeyValues ModelConfig::to_key_values() const {
  return {{"char_dim", std::to_string(char_dim)},
          {"word_dim", std::to_string(word_dim)},
          {"char_hidden", std::to_string(char_hidden)},
          {"char_layers", std::to_string(char_layers)},
          {"tag_dim", std::to_string(tag_dim)},
          {"tagger_hidden", std::to_string(tagger_hidden)},
          {"tagger_layers", std::to_string(tagger_layers)},
          {"head_hidden", std::to_string(head_hidden)},
          {"encoder_hidden", std::to_string(encoder_hidden)},
          {"encoder_layers", std::to_string(encoder_layers)},
          {"decoder_hidden", std::to_string(decoder_hidden)},
          {"decoder_layers", std::to_string(decoder_layers)},
          {"dropout", format_double(dropout)},
          {"window", std::to_string(window)},
          {"analyzer", use_analyzer ? "on" : "off"},
          {"tag_conditioning", tag_conditioning ? "on" : "off"},
          {"tag_feed", tag_every_step ? "every_step" : "first_step"},
          {"oov_policy", oov_policy == OovPolicy::all_values ? "all_values" : "closed"},
          {"loss_weighting", learned_loss_weights ? "learned" : "uniform"}};
}

ModelConfig ModelConfig::take(KeyValues& kv) {
  ModelConfig c;
  auto take_size = [&](const char* key, std::size_t& field) {
    if (auto it = kv.find(key); it != kv.end()) {
      field = parse_size_value(key, it->second);
      kv.erase(it);
    }
  };
  take_size("char_dim", c.char_dim);
  take_size("word_dim", c.word_dim);
  take_size("char_hidden", c.char_hidden);
  take_size("char_layers", c.char_layers);
  take_size("tag_dim", c.tag_dim);
  take_size("tagger_hidden", c.tagger_hidden);
  take_size("tagger_layers", c.tagger_layers);
  take_size("head_hidden", c.head_hidden);
  take_size("encoder_hidden", c.encoder_hidden);
  take_size("encoder_layers", c.encoder_layers);
  take_size("decoder_hidden", c.decoder_hidden);
  take_size("decoder_layers", c.decoder_layers);
  take_size("window", c.window);
  if (auto it = kv.find("dropout"); it != kv.end()) {
    c.dropout = parse_double_value("dropout", it->second);
    kv.erase(it);
  }
  if (auto it = kv.find("analyzer"); it != kv.end()) {
    c.use_analyzer = parse_bool_value("analyzer", it->second);
    kv.erase(it);
  }
  if (auto it = kv.find("tag_conditioning"); it != kv.end()) {
    c.tag_conditioning = parse_bool_value("tag_conditioning", it->second);
    kv.erase(it);
  }
  if (auto it = kv.find("tag_feed"); it != kv.end()) {
    if (it->second != "every_step" && it->second != "first_step") {
      throw UsageError("config key 'tag_feed': expected every_step or first_step");
    }
    c.tag_every_step = it->second == "every_step";
    kv.erase(it);
  }
  if (auto it = kv.find("oov_policy"); it != kv.end()) {
    if (it->second != "all_values" && it->second != "closed") {
      throw UsageError("config key 'oov_policy': expected all_values or closed");
    }
    c.oov_policy = it->second == "all_values" ? OovPolicy::all_values : OovPolicy::closed;
    kv.erase(it);
  }
  if (auto it = kv.find("loss_weighting"); it != kv.end()) {
    if (it->second != "uniform" && it->second != "learned") {
      throw UsageError("config key 'loss_weighting': expected uniform or learned");
    }
    c.learned_loss_weights = it->second == "learned";
    kv.erase(it);
  }
  return c;
}

}  // namespace morphdis
