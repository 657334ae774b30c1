#include "morphdis/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "morphdis/adam.hpp"
#include "morphdis/corpus.hpp"
#include "morphdis/embeddings.hpp"
#include "morphdis/error.hpp"

namespace morphdis {

namespace {

enum Stream : std::uint64_t { kShuffleStream = 0x5348, kSampleStream = 0x5353 };

bool is_lexical_parameter(const std::string& name) {
  return name.rfind("encoder", 0) == 0 || name.rfind("lemma_dec", 0) == 0 ||
         name.rfind("diac_dec", 0) == 0;
}

std::string metrics_fields(const std::string& prefix, const MetricsReport& m) {
  return prefix + "full=" + format_double(m.full) + " " + prefix + "tags=" + format_double(m.tags) +
         " " + prefix + "lex=" + format_double(m.lex) + " " + prefix + "diac=" + format_double(m.diac) +
         " " + prefix + "pos=" + format_double(m.pos);
}

nlohmann::json metrics_json(const MetricsReport& m) {
  nlohmann::json j{{"tokens", m.tokens}, {"pos", m.pos},   {"tags", m.tags},
                   {"lex", m.lex},       {"diac", m.diac}, {"full", m.full}};
  for (std::size_t f = 0; f < kNumTags; ++f) j["per_feature"][std::string(kTagNames[f])] = m.per_feature[f];
  return j;
}

struct Session {
  const TrainConfig& config;
  const TrainOptions& options;
  Checkpoint& ckpt;
  std::vector<PreparedSentence> train;
  Corpus tune;
  const MorphDictionary* dictionary;
};

EpochRecord run_epoch(Session& s, std::size_t epoch) {
  JointModel& model = *s.ckpt.model;
  ParameterStore& store = model.parameters();
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(s.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(Rng::derive(s.config.seed, kShuffleStream, epoch));
  shuffle_rng.shuffle(order);
  Rng rng(Rng::derive(s.config.seed, kSampleStream, epoch));

  AdamConfig tagger_adam;
  tagger_adam.learning_rate = s.config.learning_rate;
  AdamConfig lexical_adam = tagger_adam;
  if (s.config.dual_optimizer) lexical_adam.learning_rate = s.config.lexical_learning_rate;

  EpochRecord record;
  record.epoch = epoch;
  std::size_t step = 0;
  for (std::size_t idx : order) {
    Graph g(true, &rng);
    JointModel::LossOptions lo;
    lo.sampling_probability = s.config.sampling_probability;
    lo.gold_tag_conditioning = s.config.gold_tag_conditioning;
    lo.rng = &rng;
    const auto components = model.losses(g, s.train[idx], lo);
    Expr total = model.loss_weight_logits() != nullptr
                     ? weighted_joint_loss(g, components, *model.loss_weight_logits())
                     : joint_loss(components);
    StepRecord sr;
    sr.epoch = epoch;
    sr.step = ++step;
    for (std::size_t f = 0; f < kNumFeatures; ++f) sr.components[f] = components[f].scalar();
    sr.total = total.scalar();
    if (s.options.on_step) s.options.on_step(sr);

    g.backward(total);
    if (s.config.clip_norm > 0.0) clip_global_norm(store, s.config.clip_norm);
    for (auto& p : store) {
      adam_step(*p, is_lexical_parameter(p->name) ? lexical_adam : tagger_adam);
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) record.loss[f] += sr.components[f];
    record.total += sr.total;
  }
  const double n = static_cast<double>(s.train.size());
  for (double& l : record.loss) l /= n;
  record.total /= n;

  DecodeConfig tune_decode;
  tune_decode.beam_width = s.config.tune_beam_width;
  record.tune = evaluate_model(model, s.tune, s.dictionary, tune_decode);
  record.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

TrainResult run(Checkpoint ckpt, const TrainConfig& config, const Corpus& corpus,
                const MorphDictionary* dictionary, const TrainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto [train_part, tune_part] = split_train_tune(corpus, config.tune_fraction, config.seed);
  Session s{config, options, ckpt, {}, std::move(tune_part), dictionary};
  for (const auto& sentence : train_part) {
    s.train.push_back(ckpt.model->prepare(sentence, dictionary, true));
  }

  TrainResult result;
  for (std::size_t epoch = ckpt.state.epochs_done + 1; epoch <= config.epochs; ++epoch) {
    EpochRecord record = run_epoch(s, epoch);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (!std::isfinite(record.loss[f])) {
        throw NumericError("epoch " + std::to_string(epoch) + ": non-finite loss for feature '" +
                           std::string(feature_name(f)) + "'");
      }
    }
    ckpt.state.epochs_done = epoch;
    if (record.tune.full > ckpt.state.best_tune_full) {
      ckpt.state.best_tune_full = record.tune.full;
      ckpt.state.best_epoch = epoch;
      ckpt.snapshot_best();
    }
    ckpt.state.log_lines.push_back(record.line());
    if (options.on_epoch) options.on_epoch(record);
    result.epochs.push_back(record);
  }

  // Final metrics with the configured beam on the selected parameters.
  std::vector<Tensor> live;
  for (const auto& p : ckpt.model->parameters()) live.push_back(p->value);
  ckpt.use_best();
  DecodeConfig decode;
  decode.beam_width = config.beam_width;
  result.final_tune = evaluate_model(*ckpt.model, s.tune, dictionary, decode);
  auto& store = ckpt.model->parameters();
  for (std::size_t i = 0; i < store.size(); ++i) store[i].value = std::move(live[i]);

  result.checkpoint = std::move(ckpt);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Vocab vocab_for(const Corpus& corpus, const TrainConfig& config, const Normalizer& normalizer,
                const MorphDictionary* dictionary) {
  auto [train_part, tune_part] = split_train_tune(corpus, config.tune_fraction, config.seed);
  std::vector<Analysis> extra;
  if (dictionary != nullptr) extra = dictionary->all_analyses();
  for (const auto& sentence : tune_part) {
    for (const auto& tok : sentence) extra.push_back(tok.gold);
  }
  // Tune tags join the tag sets; characters come from the training half only.
  return build_vocab(train_part, normalizer, extra);
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(lexical_learning_rate > 0.0)) throw UsageError("lexical_learning_rate must be positive");
  if (!(tune_fraction > 0.0 && tune_fraction < 1.0)) {
    throw UsageError("tune_fraction must be in (0, 1)");
  }
  if (!(sampling_probability >= 0.0 && sampling_probability <= 1.0)) {
    throw UsageError("sampling_probability must be in [0, 1]");
  }
  if (!(clip_norm >= 0.0)) throw UsageError("clip_norm must be nonnegative");
  if (beam_width == 0 || tune_beam_width == 0) throw UsageError("beam widths must be at least 1");
}

KeyValues TrainConfig::to_key_values() const {
  return {
      {"epochs", std::to_string(epochs)},
      {"learning_rate", format_double(learning_rate)},
      {"tune_fraction", format_double(tune_fraction)},
      {"seed", std::to_string(seed)},
      {"sampling_probability", format_double(sampling_probability)},
      {"clip_norm", format_double(clip_norm)},
      {"beam_width", std::to_string(beam_width)},
      {"tune_beam_width", std::to_string(tune_beam_width)},
      {"tag_source", gold_tag_conditioning ? "gold" : "predicted"},
      {"optimizer", dual_optimizer ? "dual" : "single"},
      {"lexical_learning_rate", format_double(lexical_learning_rate)},
  };
}

TrainConfig TrainConfig::take(KeyValues& kv) {
  TrainConfig c;
  c.model = ModelConfig::take(kv);
  auto take = [&](const char* key, auto&& assign) {
    if (auto it = kv.find(key); it != kv.end()) {
      assign(it->second);
      kv.erase(it);
    }
  };
  take("epochs", [&](const std::string& v) { c.epochs = parse_size_value("epochs", v); });
  take("learning_rate",
       [&](const std::string& v) { c.learning_rate = parse_double_value("learning_rate", v); });
  take("tune_fraction",
       [&](const std::string& v) { c.tune_fraction = parse_double_value("tune_fraction", v); });
  take("seed", [&](const std::string& v) { c.seed = parse_size_value("seed", v); });
  take("sampling_probability", [&](const std::string& v) {
    c.sampling_probability = parse_double_value("sampling_probability", v);
  });
  take("clip_norm", [&](const std::string& v) { c.clip_norm = parse_double_value("clip_norm", v); });
  take("beam_width", [&](const std::string& v) { c.beam_width = parse_size_value("beam_width", v); });
  take("tune_beam_width",
       [&](const std::string& v) { c.tune_beam_width = parse_size_value("tune_beam_width", v); });
  take("tag_source", [&](const std::string& v) {
    if (v != "gold" && v != "predicted") throw UsageError("tag_source must be gold or predicted");
    c.gold_tag_conditioning = v == "gold";
  });
  take("optimizer", [&](const std::string& v) {
    if (v != "single" && v != "dual") throw UsageError("optimizer must be single or dual");
    c.dual_optimizer = v == "dual";
  });
  take("lexical_learning_rate", [&](const std::string& v) {
    c.lexical_learning_rate = parse_double_value("lexical_learning_rate", v);
  });
  return c;
}

std::string EpochRecord::line() const {
  std::ostringstream os;
  os << "epoch=" << epoch << " loss=" << format_double(total);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    os << " loss_" << feature_name(f) << "=" << format_double(loss[f]);
  }
  os << " " << metrics_fields("tune_", tune);
  return os.str();
}

std::string TrainResult::summary_json() const {
  const TrainingState& st = checkpoint.state;
  nlohmann::json j;
  j["epochs_done"] = st.epochs_done;
  j["best_epoch"] = st.best_epoch;
  j["best_tune_full"] = st.best_tune_full;
  j["final_tune"] = metrics_json(final_tune);
  j["wall_seconds"] = wall_seconds;
  j["epochs"] = nlohmann::json::array();
  for (const auto& e : epochs) {
    nlohmann::json ej{{"epoch", e.epoch}, {"loss", e.total}, {"tune", metrics_json(e.tune)},
                      {"seconds", e.seconds}};
    for (std::size_t f = 0; f < kNumFeatures; ++f) ej["loss_by_feature"][std::string(feature_name(f))] = e.loss[f];
    j["epochs"].push_back(std::move(ej));
  }
  return j.dump(2);
}

std::vector<Analysis> predict_corpus(const JointModel& model, const Corpus& corpus,
                                     const MorphDictionary* dictionary, const DecodeConfig& decode) {
  std::vector<Analysis> out;
  for (const auto& sentence : corpus) {
    for (const auto& p : model.predict(model.prepare(sentence, dictionary, false), decode)) {
      out.push_back(p.analysis());
    }
  }
  return out;
}

MetricsReport evaluate_model(const JointModel& model, const Corpus& corpus,
                             const MorphDictionary* dictionary, const DecodeConfig& decode) {
  std::vector<Analysis> gold;
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) gold.push_back(tok.gold);
  }
  return evaluate_analyses(gold, predict_corpus(model, corpus, dictionary, decode));
}

TrainResult train(const TrainConfig& config, const Corpus& corpus, const MorphDictionary* dictionary,
                  const TrainOptions& options) {
  config.validate();
  if (corpus.empty()) throw DataError("training corpus is empty");
  Checkpoint ckpt;
  ckpt.train_config = config.to_key_values();
  ckpt.model = std::make_unique<JointModel>(
      config.model, vocab_for(corpus, config, options.normalizer, dictionary), options.normalizer,
      config.seed);
  if (!options.embeddings_path.empty()) {
    load_embeddings(options.embeddings_path, ckpt.model->vocab(), config.model.word_dim,
                    ckpt.model->word_embeddings());
  }
  ckpt.snapshot_best();
  return run(std::move(ckpt), config, corpus, dictionary, options);
}

TrainResult resume(Checkpoint checkpoint, const TrainConfig& config, const Corpus& corpus,
                   const MorphDictionary* dictionary, const TrainOptions& options) {
  config.validate();
  const JointModel& m = *checkpoint.model;
  if (m.config().to_key_values() != config.model.to_key_values()) {
    throw DataError("resume: architecture differs from the checkpoint");
  }
  if (vocab_for(corpus, config, m.normalizer(), dictionary) != m.vocab()) {
    throw DataError("resume: corpus and dictionary do not reproduce the checkpoint vocabularies");
  }
  checkpoint.train_config = config.to_key_values();
  return run(std::move(checkpoint), config, corpus, dictionary, options);
}

}  // namespace morphdis
