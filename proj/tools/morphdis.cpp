#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "morphdis/config.hpp"
#include "morphdis/corpus.hpp"
#include "morphdis/disambig.hpp"
#include "morphdis/error.hpp"
#include "morphdis/gradient_suite.hpp"
#include "morphdis/train.hpp"

using namespace morphdis;

namespace {

// Config file, then --set overrides, then dedicated flags.
struct Settings {
  std::string config_path;
  std::vector<std::string> assignments;
  KeyValues flags;

  KeyValues resolve() const {
    KeyValues kv;
    if (!config_path.empty()) kv = load_key_values(config_path);
    for (const auto& a : assignments) {
      auto [k, v] = split_assignment(a);
      kv[k] = v;
    }
    for (const auto& [k, v] : flags) kv[k] = v;
    return kv;
  }
};

std::optional<std::string> take(KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  std::string v = it->second;
  kv.erase(it);
  return v;
}

std::string require(KeyValues& kv, const std::string& key) {
  auto v = take(kv, key);
  if (!v || v->empty()) throw UsageError("missing required setting '" + key + "'");
  return *v;
}

void reject_unknown(const KeyValues& kv) {
  if (!kv.empty()) throw UsageError("unknown config key '" + kv.begin()->first + "'");
}

void log_config(const KeyValues& kv) {
  for (const auto& [k, v] : kv) std::cerr << "config " << k << "=" << v << "\n";
}

void add_settings(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key=value config file");
  cmd->add_option("--set", s.assignments, "override one setting (key=value)");
}

void add_flag(CLI::App* cmd, Settings& s, const std::string& flag, const std::string& key,
              const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

int run_train(const Settings& s) {
  KeyValues kv = s.resolve();
  KeyValues shown = kv;
  const std::string corpus_path = require(kv, "corpus");
  const std::string output = require(kv, "output");
  const auto dictionary_path = take(kv, "dictionary");
  const auto embeddings = take(kv, "embeddings");
  const auto normalization = take(kv, "normalization");
  const auto resume_path = take(kv, "resume");
  const std::string report_path = take(kv, "report").value_or(output + ".log");
  const std::string summary_path = take(kv, "summary").value_or(output + ".summary.json");
  const TrainConfig config = TrainConfig::take(kv);
  reject_unknown(kv);
  config.validate();

  KeyValues resolved = config.model.to_key_values();
  for (const auto& [k, v] : config.to_key_values()) resolved[k] = v;
  for (const auto& [k, v] : shown) resolved.emplace(k, v);
  log_config(resolved);

  std::optional<Checkpoint> previous;
  if (resume_path) previous = load_checkpoint(*resume_path);
  TrainOptions options;
  if (previous) {
    options.normalizer = previous->model->normalizer();
  } else if (normalization) {
    options.normalizer = Normalizer::load(*normalization);
  }
  if (embeddings) options.embeddings_path = *embeddings;
  options.on_epoch = [](const EpochRecord& r) { std::cerr << r.line() << "\n"; };

  const Corpus corpus = parse_corpus(corpus_path);
  std::optional<MorphDictionary> dictionary;
  if (dictionary_path) dictionary = load_dictionary(*dictionary_path, options.normalizer);
  const MorphDictionary* dict = dictionary ? &*dictionary : nullptr;

  TrainResult result = previous ? resume(std::move(*previous), config, corpus, dict, options)
                                : train(config, corpus, dict, options);
  save_checkpoint(output, result.checkpoint);
  {
    std::ofstream log = open_output(report_path);
    for (const auto& line : result.checkpoint.state.log_lines) log << line << "\n";
  }
  {
    std::ofstream summary = open_output(summary_path);
    summary << result.summary_json() << "\n";
  }
  std::cout << "checkpoint=" << output << " epochs=" << result.checkpoint.state.epochs_done
            << " best_epoch=" << result.checkpoint.state.best_epoch << " "
            << result.final_tune.summary() << "\n";
  return 0;
}

int run_disambiguate(const Settings& s) {
  KeyValues kv = s.resolve();
  log_config(kv);
  const std::string checkpoint_path = require(kv, "checkpoint");
  const std::string input = require(kv, "input");
  const auto output = take(kv, "output");
  const auto dictionary_path = take(kv, "dictionary");
  const auto weights_path = take(kv, "weights");
  const std::string mode = take(kv, "mode").value_or(dictionary_path ? "analyzer" : "model");
  DecodeConfig decode;
  if (auto v = take(kv, "beam_width")) decode.beam_width = parse_size_value("beam_width", *v);
  if (auto v = take(kv, "max_output_length")) {
    decode.max_output_length = parse_size_value("max_output_length", *v);
  }
  reject_unknown(kv);
  if (mode != "analyzer" && mode != "model") throw UsageError("mode must be analyzer or model");
  if (mode == "analyzer" && !dictionary_path) throw UsageError("analyzer mode needs a dictionary");
  if (decode.beam_width == 0) throw UsageError("beam_width must be at least 1");

  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  ckpt.use_best();
  const JointModel& model = *ckpt.model;
  std::optional<MorphDictionary> dictionary;
  if (dictionary_path) dictionary = load_dictionary(*dictionary_path, model.normalizer());
  const RankingWeights weights = weights_path ? RankingWeights::load(*weights_path) : RankingWeights{};

  CorpusReadOptions ro;
  ro.gold_optional = true;
  ro.allow_extra_columns = true;
  const Corpus corpus = parse_corpus(input, ro);

  std::ofstream file;
  if (output) file = open_output(*output);
  std::ostream& out = output ? file : std::cout;
  for (const auto& sentence : corpus) {
    const auto results = disambiguate(model, dictionary ? &*dictionary : nullptr, weights, sentence, decode,
                                      mode == "analyzer" ? DisambiguationMode::analyzer
                                                         : DisambiguationMode::model);
    write_disambiguation(out, sentence, results);
  }
  return 0;
}

int run_evaluate(const Settings& s) {
  KeyValues kv = s.resolve();
  log_config(kv);
  const std::string gold_path = require(kv, "gold");
  const std::string system_path = require(kv, "system");
  const auto normalization = take(kv, "normalization");
  reject_unknown(kv);
  const Normalizer normalizer =
      normalization ? Normalizer::load(*normalization) : Normalizer::arabic_default();
  CorpusReadOptions ro;
  ro.allow_extra_columns = true;
  const MetricsReport m = evaluate(parse_corpus(gold_path, ro), parse_corpus(system_path, ro), normalizer);
  std::cout << m.summary() << "\n";
  for (std::size_t f = 0; f < kNumTags; ++f) {
    std::cout << "feature=" << kTagNames[f] << " accuracy=" << format_double(m.per_feature[f]) << "\n";
  }
  return 0;
}

int run_gradcheck(const Settings& s) {
  KeyValues kv = s.resolve();
  log_config(kv);
  std::uint64_t seed = 11;
  if (auto v = take(kv, "seed")) seed = parse_size_value("seed", *v);
  reject_unknown(kv);
  bool ok = true;
  double worst = 0.0;
  for (const auto& c : run_gradient_suite(seed)) {
    std::cout << "component=" << c.component
              << " max_relative_error=" << format_double(c.report.max_relative_error)
              << " status=" << (c.report.passed ? "pass" : "fail") << "\n";
    ok = ok && c.report.passed;
    worst = std::max(worst, c.report.max_relative_error);
  }
  if (!ok) {
    throw NumericError("gradient check failed: max relative error " + format_double(worst) +
                       " exceeds " + format_double(kGradientTolerance));
  }
  return 0;
}

int run_inspect(const Settings& s) {
  KeyValues kv = s.resolve();
  const std::string path = require(kv, "checkpoint");
  reject_unknown(kv);
  const Checkpoint ckpt = load_checkpoint(path);
  const JointModel& m = *ckpt.model;
  std::cout << "format_version=" << kCheckpointVersion << "\n";
  for (const auto& [k, v] : m.config().to_key_values()) std::cout << "model." << k << "=" << v << "\n";
  for (const auto& [k, v] : ckpt.train_config) std::cout << "train." << k << "=" << v << "\n";
  std::cout << "state.epochs_done=" << ckpt.state.epochs_done << "\n"
            << "state.best_epoch=" << ckpt.state.best_epoch << "\n"
            << "state.best_tune_full=" << format_double(ckpt.state.best_tune_full) << "\n";
  std::cout << "vocab.chars=" << m.vocab().chars.size() << "\n"
            << "vocab.words=" << m.vocab().words.size() << "\n"
            << "vocab.lemma_chars=" << m.vocab().lemma_chars.size() << "\n"
            << "vocab.diac_chars=" << m.vocab().diac_chars.size() << "\n";
  for (std::size_t f = 0; f < kNumTags; ++f) {
    std::cout << "vocab.tag." << kTagNames[f] << "=" << m.vocab().tags[f].size() << "\n";
  }
  for (const auto& p : m.parameters()) {
    std::cout << "param " << p->name << " " << p->value.shape_string() << " steps=" << p->step_count
              << "\n";
  }
  std::cout << "scalars=" << m.parameters().scalar_count() << "\n";
  return 0;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

void print_error(const char* kind, int code, const std::string& message) {
  std::cerr << "error kind=" << kind << " exit=" << code << " message=" << one_line(message) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint morphological tagging, lemmatization and diacritization"};
  app.require_subcommand(1);

  Settings train_s, dis_s, eval_s, grad_s, inspect_s;

  auto* train_cmd = app.add_subcommand("train", "train or resume a model");
  add_settings(train_cmd, train_s);
  add_flag(train_cmd, train_s, "--corpus", "corpus", "training corpus (TSV)");
  add_flag(train_cmd, train_s, "--dictionary", "dictionary", "analyzer dictionary (TSV)");
  add_flag(train_cmd, train_s, "--embeddings", "embeddings", "pretrained word vectors");
  add_flag(train_cmd, train_s, "--normalization", "normalization", "orthographic normalization table");
  add_flag(train_cmd, train_s, "--output,-o", "output", "checkpoint to write");
  add_flag(train_cmd, train_s, "--report", "report", "per-epoch log (default <output>.log)");
  add_flag(train_cmd, train_s, "--summary", "summary", "JSON summary (default <output>.summary.json)");
  add_flag(train_cmd, train_s, "--resume", "resume", "checkpoint to continue from");
  add_flag(train_cmd, train_s, "--epochs", "epochs", "number of epochs");
  add_flag(train_cmd, train_s, "--seed", "seed", "random seed");

  auto* dis_cmd = app.add_subcommand("disambiguate", "choose a full analysis for every token");
  add_settings(dis_cmd, dis_s);
  add_flag(dis_cmd, dis_s, "--checkpoint,-m", "checkpoint", "trained checkpoint");
  add_flag(dis_cmd, dis_s, "--input,-i", "input", "corpus-format input (gold columns optional)");
  add_flag(dis_cmd, dis_s, "--output,-o", "output", "output file (default stdout)");
  add_flag(dis_cmd, dis_s, "--dictionary", "dictionary", "analyzer dictionary (TSV)");
  add_flag(dis_cmd, dis_s, "--weights", "weights", "ranking weights file");
  add_flag(dis_cmd, dis_s, "--mode", "mode", "analyzer or model");
  add_flag(dis_cmd, dis_s, "--beam-width", "beam_width", "decoder beam width");

  auto* eval_cmd = app.add_subcommand("evaluate", "score system output against gold");
  add_settings(eval_cmd, eval_s);
  add_flag(eval_cmd, eval_s, "--gold,-g", "gold", "gold corpus");
  add_flag(eval_cmd, eval_s, "--system,-s", "system", "system output");
  add_flag(eval_cmd, eval_s, "--normalization", "normalization", "normalization table for alignment");

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  add_settings(grad_cmd, grad_s);
  add_flag(grad_cmd, grad_s, "--seed", "seed", "random seed");

  auto* inspect_cmd = app.add_subcommand("inspect", "print a checkpoint's configuration and shapes");
  add_settings(inspect_cmd, inspect_s);
  add_flag(inspect_cmd, inspect_s, "--checkpoint,-m", "checkpoint", "checkpoint to inspect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", 1, e.what());
    return 1;
  }

  try {
    if (*train_cmd) return run_train(train_s);
    if (*dis_cmd) return run_disambiguate(dis_s);
    if (*eval_cmd) return run_evaluate(eval_s);
    if (*grad_cmd) return run_gradcheck(grad_s);
    if (*inspect_cmd) return run_inspect(inspect_s);
  } catch (const UsageError& e) {
    print_error("usage", 1, e.what());
    return 1;
  } catch (const DataError& e) {
    print_error("data", 2, e.what());
    return 2;
  } catch (const Error& e) {
    print_error("numeric", 3, e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("data", 2, e.what());
    return 2;
  }
  return 1;
}
