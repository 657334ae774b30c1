// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "morphdis/config.hpp"
#include "morphdis/corpus.hpp"
#include "morphdis/disambig.hpp"
#include "morphdis/error.hpp"
#include "morphdis/gradient_suite.hpp"
#include "morphdis/train.hpp"
#include "morphdis/utf8.hpp"

using namespace morphdis;

namespace {

const std::string kData = MORPHDIS_DATA_DIR;

constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 120.0;
constexpr double kOverfitFull = 0.99;
constexpr std::size_t kOverfitEpochs = 300;
constexpr double kOverfitSeconds = 15 * 60.0;
constexpr double kNormalizationRecovery = 0.95;
constexpr double kLossArithmetic = 1e-12;
constexpr std::size_t kBeamInputs = 100;
constexpr std::size_t kRankingTrials = 1000;
constexpr std::size_t kMetricTrials = 1000;
constexpr std::size_t kDeterminismEpochs = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// Micro configuration with the path keys stripped.
TrainConfig micro_config() {
  KeyValues kv = load_key_values(kData + "/micro/micro.conf");
  for (const char* key : {"corpus", "dictionary", "normalization"}) kv.erase(key);
  TrainConfig c = TrainConfig::take(kv);
  if (!kv.empty()) throw UsageError("micro.conf: unknown key " + kv.begin()->first);
  return c;
}

struct MicroData {
  Normalizer normalizer = Normalizer::load(kData + "/micro/normalization.tsv");
  Corpus corpus = parse_corpus(kData + "/micro/corpus.tsv");
  Corpus test = parse_corpus(kData + "/micro/test.tsv");
  MorphDictionary dictionary = load_dictionary(kData + "/micro/dictionary.tsv", normalizer);
};

// Shared 300-epoch run used by criteria 2, 3, 4, 6, 7 and 10.
struct OverfitRun {
  TrainConfig config;
  TrainResult result;
  std::vector<StepRecord> steps;
  double seconds = 0.0;
  Corpus train_part;
};

std::vector<Analysis> gold_of(const Corpus& corpus) {
  std::vector<Analysis> out;
  for (const auto& s : corpus) {
    for (const auto& t : s) out.push_back(t.gold);
  }
  return out;
}

std::vector<Analysis> disambiguated(const JointModel& model, const MorphDictionary& dict,
                                    const Corpus& corpus, DisambiguationMode mode) {
  std::vector<Analysis> out;
  const RankingWeights weights;
  const DecodeConfig decode;
  for (const auto& sentence : corpus) {
    for (const auto& d : disambiguate(model, &dict, weights, sentence, decode, mode)) {
      out.push_back(d.chosen);
    }
  }
  return out;
}

// ---- criterion 1 ----
Outcome gradient_suite() {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = run_gradient_suite();
  const double secs = seconds_since(start);
  Outcome o{true, ""};
  double worst = 0.0;
  for (const auto& c : checks) {
    worst = std::max(worst, c.report.max_relative_error);
    o.pass = o.pass && c.report.max_relative_error < kGradTolerance;
    o.detail += c.component + "=" + fmt(c.report.max_relative_error, 2) + " ";
  }
  o.pass = o.pass && checks.size() == 7 && secs < kGradSeconds;
  o.detail += "max=" + fmt(worst, 2) + " (<" + fmt(kGradTolerance) + ") time=" + fmt(secs, 3) + "s";
  return o;
}

// ---- criterion 2 ----
Outcome overfit(const OverfitRun& run, const MicroData& data) {
  const Checkpoint& ckpt = run.result.checkpoint;
  const JointModel& model = *ckpt.model;
  DecodeConfig decode;
  decode.beam_width = run.config.beam_width;
  const MetricsReport last = evaluate_model(model, run.train_part, &data.dictionary, decode);

  // Selection: the chosen epoch maximizes tune FULL, earliest among ties.
  double max_full = -1.0;
  std::size_t argmax_epoch = 0;
  for (const auto& e : run.result.epochs) {
    if (e.tune.full > max_full) {
      max_full = e.tune.full;
      argmax_epoch = e.epoch;
    }
  }
  const bool selection = ckpt.state.best_epoch == argmax_epoch && ckpt.state.best_tune_full == max_full;

  // The stored best parameters reproduce the selected epoch's tune score.
  Checkpoint copy;
  {
    std::stringstream buf;
    write_checkpoint(buf, ckpt);
    copy = read_checkpoint(buf, "memory");
  }
  copy.use_best();
  auto [train_part, tune_part] = split_train_tune(data.corpus, run.config.tune_fraction, run.config.seed);
  DecodeConfig greedy;
  greedy.beam_width = run.config.tune_beam_width;
  const double replay = evaluate_model(*copy.model, tune_part, &data.dictionary, greedy).full;

  Outcome o;
  o.pass = last.full >= kOverfitFull && run.result.epochs.size() <= kOverfitEpochs && selection &&
           replay == max_full && run.seconds < kOverfitSeconds;
  o.detail = "train FULL=" + fmt(last.full) + " (>=" + fmt(kOverfitFull) + ") over " +
             std::to_string(last.tokens) + " tokens after " + std::to_string(run.result.epochs.size()) +
             " epochs; best epoch " + std::to_string(ckpt.state.best_epoch) + " tune FULL=" +
             fmt(max_full) + (selection ? " (argmax, earliest tie)" : " (WRONG selection)") +
             " replay=" + fmt(replay) + " time=" + fmt(run.seconds, 4) + "s";
  return o;
}

// ---- criterion 3 ----
Outcome gradient_stop(JointModel& model, const MicroData& data) {
  ParameterStore& store = model.parameters();
  std::vector<Parameter*> tagger_params = model.tagger().parameters();
  std::size_t nonzero_decoder = 0, mismatched = 0, sentences = 0;
  double tagger_grad_norm = 0.0;
  for (std::size_t i = 0; i < data.corpus.size() && sentences < 10; i += 5, ++sentences) {
    const PreparedSentence p = model.prepare(data.corpus[i], &data.dictionary, true);
    auto run = [&](const std::function<Expr(Graph&, const std::array<Expr, kNumFeatures>&)>& pick) {
      store.zero_grad();
      Graph g(false);
      const auto parts = model.losses(g, p, {});
      g.backward(pick(g, parts));
      std::vector<Tensor> grads;
      for (Parameter* q : tagger_params) grads.push_back(q->grad);
      return grads;
    };
    const auto decoder_only = run([](Graph&, const auto& parts) {
      return mean(std::vector<Expr>{parts[kLemmaFeature], parts[kDiacFeature]});
    });
    const auto joint = run([](Graph&, const auto& parts) { return joint_loss(parts); });
    const auto tagger_only = run([](Graph& g, const auto& parts) {
      std::vector<Expr> terms(parts.begin(), parts.begin() + kNumTags);
      terms.push_back(g.constant(Tensor::vector({0.0})));
      terms.push_back(g.constant(Tensor::vector({0.0})));
      return mean(terms);
    });
    for (std::size_t k = 0; k < tagger_params.size(); ++k) {
      for (double v : decoder_only[k].storage()) nonzero_decoder += v != 0.0;
      mismatched += !(joint[k] == tagger_only[k]);
      for (double v : joint[k].storage()) tagger_grad_norm += v * v;
    }
  }
  store.zero_grad();
  Outcome o;
  o.pass = nonzero_decoder == 0 && mismatched == 0 && tagger_grad_norm > 0.0;
  o.detail = std::to_string(sentences) + " sentences, " + std::to_string(tagger_params.size()) +
             " tagger tensors: nonzero decoder-only grads=" + std::to_string(nonzero_decoder) +
             ", joint vs tagger-only mismatches=" + std::to_string(mismatched) +
             ", |joint tagger grad|=" + fmt(std::sqrt(tagger_grad_norm), 3);
  return o;
}

// ---- criterion 4 ----
struct BeamTally {
  std::size_t inputs = 0, greedy_mismatch = 0, score_violations = 0;
};

void beam_trials(const JointModel& model, std::uint64_t seed, BeamTally& t) {
  Rng rng(seed);
  const Vocab& v = model.vocab();
  std::vector<std::string> alphabet;
  for (std::size_t id = sym::kReservedChars; id < v.chars.size(); ++id) alphabet.push_back(v.chars[id]);
  std::size_t done = 0;
  while (done < kBeamInputs) {
    Sentence s;
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t j = 0; j < n; ++j) {
      std::string word;
      const std::size_t len = 1 + rng.below(7);
      for (std::size_t k = 0; k < len; ++k) word += alphabet[rng.below(alphabet.size())];
      s.push_back({word, {}});
    }
    const PreparedSentence p = model.prepare(s, nullptr, false);
    Graph g(false, nullptr, false);
    std::vector<TaggerToken> inputs;
    for (const auto& tok : p.tokens) inputs.push_back(tok.tagger);
    const auto logits = model.tagger().forward(g, inputs);
    for (std::size_t j = 0; j < p.tokens.size() && done < kBeamInputs; ++j, ++done) {
      const TagPrediction tags = predict_tags(logits[j], v);
      const EncoderOutput enc = model.encoder().encode(g, p.tokens[j].window);
      const std::optional<Expr> cond = model.tagger().tag_conditioning(g, tags.ids);
      const std::size_t max_len = DecodeConfig{}.max_length_for(p.tokens[j].target_length);
      for (std::size_t f : {kLemmaFeature, kDiacFeature}) {
        const Decoder& dec = model.decoder(f);
        const DecodeResult greedy = decode_greedy(g, dec, enc, cond, max_len);
        const DecodeResult beam1 = decode_beam(g, dec, enc, cond, 1, max_len);
        const DecodeResult beam5 = decode_beam(g, dec, enc, cond, 5, max_len);
        t.greedy_mismatch += greedy.ids != beam1.ids || greedy.score != beam1.score;
        t.score_violations += beam5.score < beam1.score;
      }
      ++t.inputs;
    }
  }
}

Outcome beam_properties(const JointModel& trained, const TrainConfig& config, const MicroData& data) {
  BeamTally t;
  beam_trials(trained, 101, t);
  JointModel fresh(config.model, trained.vocab(), data.normalizer, 99);
  beam_trials(fresh, 202, t);
  Outcome o;
  o.pass = t.greedy_mismatch == 0 && t.score_violations == 0 && t.inputs == 2 * kBeamInputs;
  o.detail = std::to_string(t.inputs) + " random inputs (trained + fresh model) x 2 decoders: " +
             "width-1 vs greedy mismatches=" + std::to_string(t.greedy_mismatch) +
             ", width-5 score < width-1 score=" + std::to_string(t.score_violations);
  return o;
}

// ---- criterion 5 ----
std::size_t brute_force_choice(const Analysis& pred, const std::vector<Analysis>& cands,
                               const std::array<double, kNumFeatures>& w) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    double s = 0.0;
    s += pred.diac == cands[i].diac ? w[kDiacFeature] : 0.0;
    s += pred.lemma == cands[i].lemma ? w[kLemmaFeature] : 0.0;
    for (std::size_t f = 0; f < kNumTags; ++f) s += pred.tags[f] == cands[i].tags[f] ? w[f] : 0.0;
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

Analysis random_analysis(Rng& rng) {
  static const char* const kValues[] = {"a", "b", "c"};
  Analysis a;
  a.diac = kValues[rng.below(3)];
  a.lemma = kValues[rng.below(3)];
  for (auto& t : a.tags) t = kValues[rng.below(2)];
  return a;
}

Outcome ranking_oracle() {
  Rng rng(5);
  std::size_t disagreements = 0;
  for (std::size_t trial = 0; trial < kRankingTrials; ++trial) {
    const Analysis pred = random_analysis(rng);
    std::vector<Analysis> cands(1 + rng.below(8));
    for (auto& c : cands) c = random_analysis(rng);
    RankingWeights w;
    for (double& x : w.weights) x = rng.below(4) == 0 ? 0.0 : static_cast<double>(rng.below(5));
    w.weights[rng.below(kNumFeatures)] = 1.0;
    const Disambiguation d = rank_analyses(pred, cands, w);
    const std::size_t expect = brute_force_choice(pred, cands, w.weights);
    disagreements += !(d.chosen.diac == cands[expect].diac && d.chosen.lemma == cands[expect].lemma &&
                       d.chosen.tags == cands[expect].tags);
  }

  const MorphDictionary table = load_dictionary(kData + "/lmthm/dictionary.tsv", Normalizer::identity());
  const std::vector<Analysis>& rows = *table.lookup("lmthm");
  const RankingWeights unit;
  // Tags of rows 6 and 7, lemma of row 6, diac matching neither.
  Analysis pred = rows[5];
  pred.diac = "limutahamK";
  const Disambiguation by_lemma6 = rank_analyses(pred, rows, unit);
  pred.lemma = rows[6].lemma;
  const Disambiguation by_lemma7 = rank_analyses(pred, rows, unit);
  const Disambiguation exact1 = rank_analyses(rows[0], rows, unit);
  const bool table_ok = rows.size() == 7 && by_lemma6.chosen.diac == "limut~ahamK" &&
                        by_lemma6.score == 15.0 && by_lemma7.chosen.diac == "limut~ahimK" &&
                        exact1.chosen.diac == "lam~atohum" && exact1.score == 16.0;

  Outcome o;
  o.pass = disagreements == 0 && table_ok;
  o.detail = std::to_string(kRankingTrials) + " random triples, disagreements with brute force=" +
             std::to_string(disagreements) + "; lmthm fixture: lemma mut~aham -> " + by_lemma6.chosen.diac +
             " (score " + fmt(by_lemma6.score) + "), lemma mut~ahim -> " + by_lemma7.chosen.diac +
             ", exact row 1 -> " + exact1.chosen.diac + " (score " + fmt(exact1.score) + ")";
  return o;
}

// ---- criterion 6 ----
Outcome normalization_learning(const JointModel& model, const OverfitRun& run, const MicroData& data) {
  std::size_t affected = 0, recovered = 0;
  DecodeConfig decode;
  decode.beam_width = run.config.beam_width;
  for (const auto& sentence : run.train_part) {
    const auto preds = model.predict(model.prepare(sentence, &data.dictionary, false), decode);
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      const std::string& surface = sentence[j].surface;
      if (surface.empty() || surface.back() != 'h') continue;
      ++affected;
      recovered += preds[j].diac_text == sentence[j].gold.diac;
    }
  }
  const double rate = affected > 0 ? static_cast<double>(recovered) / static_cast<double>(affected) : 0.0;
  Outcome o;
  o.pass = affected >= 10 && rate >= kNormalizationRecovery;
  o.detail = std::to_string(recovered) + "/" + std::to_string(affected) +
             " training tokens written with final h reproduce the gold taa-marbuta diac (" + fmt(rate) +
             ", >=" + fmt(kNormalizationRecovery) + ")";
  return o;
}

// ---- criterion 7 ----
Outcome loss_arithmetic(const OverfitRun& run) {
  double worst = 0.0;
  for (const auto& s : run.steps) {
    long double sum = 0.0L;
    for (double c : s.components) sum += c;
    const double brute = static_cast<double>(sum / kNumFeatures);
    worst = std::max(worst, std::abs(s.total - brute));
  }
  Outcome o;
  o.pass = !run.steps.empty() && worst <= kLossArithmetic;
  o.detail = std::to_string(run.steps.size()) + " logged steps, max |total - mean(components)|=" +
             fmt(worst, 3) + " (<=" + fmt(kLossArithmetic) + ")";
  return o;
}

// ---- criterion 8 ----
Outcome determinism(const MicroData& data) {
  TrainConfig config = micro_config();
  config.epochs = kDeterminismEpochs;
  TrainOptions options;
  options.normalizer = data.normalizer;
  std::string bytes[2], logs[2];
  for (int r = 0; r < 2; ++r) {
    TrainResult res = train(config, data.corpus, &data.dictionary, options);
    std::ostringstream out;
    write_checkpoint(out, res.checkpoint);
    bytes[r] = out.str();
    for (const auto& l : res.checkpoint.state.log_lines) logs[r] += l + "\n";
  }
  Outcome o;
  o.pass = bytes[0] == bytes[1] && logs[0] == logs[1] && !logs[0].empty();
  o.detail = "two " + std::to_string(kDeterminismEpochs) + "-epoch runs: checkpoints " +
             (bytes[0] == bytes[1] ? "identical" : "DIFFER") + " (" + std::to_string(bytes[0].size()) +
             " bytes), epoch logs " + (logs[0] == logs[1] ? "identical" : "DIFFER");
  return o;
}

// ---- criterion 9 ----
Outcome metric_dominance() {
  Rng rng(9);
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < kMetricTrials; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<Analysis> gold(n), sys(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = random_analysis(rng);
      sys[i] = gold[i];
      for (std::size_t k = rng.below(4); k > 0; --k) {
        const std::size_t f = rng.below(kNumFeatures);
        if (f == kLemmaFeature) sys[i].lemma += "x";
        else if (f == kDiacFeature) sys[i].diac += "x";
        else sys[i].tags[f] += "x";
      }
    }
    const MetricsReport m = evaluate_analyses(gold, sys);
    violations += m.full > std::min({m.tags, m.lex, m.diac, m.pos});
  }

  std::vector<Analysis> gold(10), sys;
  Rng fixture(3);
  for (auto& a : gold) a = random_analysis(fixture);
  sys = gold;
  sys[4].tags[*tag_index("cas")] = "wrong";
  const MetricsReport m = evaluate_analyses(gold, sys);
  const bool fixture_ok = m.pos == 1.0 && m.tags == 0.9 && m.lex == 1.0 && m.diac == 1.0 && m.full == 0.9;

  Outcome o;
  o.pass = violations == 0 && fixture_ok;
  o.detail = std::to_string(kMetricTrials) + " random pairs, dominance violations=" +
             std::to_string(violations) + "; fixture pos=" + fmt(m.pos) + " tags=" + fmt(m.tags) +
             " lex=" + fmt(m.lex) + " diac=" + fmt(m.diac) + " full=" + fmt(m.full);
  return o;
}

// ---- criterion 10 ----
Outcome ablation_direction(const JointModel& model, const MicroData& data) {
  auto full_of = [&](const Corpus& c, DisambiguationMode mode) {
    return evaluate_analyses(gold_of(c), disambiguated(model, data.dictionary, c, mode)).full;
  };
  const double corpus_analyzer = full_of(data.corpus, DisambiguationMode::analyzer);
  const double corpus_model = full_of(data.corpus, DisambiguationMode::model);
  const double test_analyzer = full_of(data.test, DisambiguationMode::analyzer);
  const double test_model = full_of(data.test, DisambiguationMode::model);
  Outcome o;
  o.pass = corpus_analyzer >= corpus_model && test_analyzer >= test_model;
  o.detail = "selected model, FULL analyzer vs model mode: micro-corpus " + fmt(corpus_analyzer) + " vs " +
             fmt(corpus_model) + ", held-out micro test " + fmt(test_analyzer) + " vs " + fmt(test_model);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << o.detail
              << std::endl;
  };

  report(1, "gradient suite", gradient_suite);

  std::optional<MicroData> data;
  std::optional<OverfitRun> run;
  try {
    data.emplace();
    run.emplace();
    run->config = micro_config();
    TrainOptions options;
    options.normalizer = data->normalizer;
    options.on_step = [&](const StepRecord& s) { run->steps.push_back(s); };
    const auto start = std::chrono::steady_clock::now();
    run->result = train(run->config, data->corpus, &data->dictionary, options);
    run->seconds = seconds_since(start);
    run->train_part = split_train_tune(data->corpus, run->config.tune_fraction, run->config.seed).first;
  } catch (const std::exception& e) {
    std::cout << "micro-corpus training failed: " << e.what() << std::endl;
    run.reset();
  }
  auto needs_run = [&](const std::function<Outcome()>& fn) {
    return [&, fn] { return run ? fn() : Outcome{false, "micro-corpus training did not complete"}; };
  };

  report(2, "overfit micro-corpus", needs_run([&] { return overfit(*run, *data); }));
  report(3, "gradient stop", needs_run([&] { return gradient_stop(*run->result.checkpoint.model, *data); }));
  report(4, "beam properties", needs_run([&] {
           return beam_properties(*run->result.checkpoint.model, run->config, *data);
         }));
  report(5, "ranking oracle", ranking_oracle);

  // Criteria 6 and 10 use the selected (best-epoch) parameters.
  if (run) run->result.checkpoint.use_best();
  report(6, "normalization learning", needs_run([&] {
           return normalization_learning(*run->result.checkpoint.model, *run, *data);
         }));
  report(7, "joint-loss arithmetic", needs_run([&] { return loss_arithmetic(*run); }));
  report(8, "determinism", [&] { return determinism(data ? *data : MicroData{}); });
  report(9, "metric dominance", metric_dominance);
  report(10, "ablation direction", needs_run([&] { return ablation_direction(*run->result.checkpoint.model, *data); }));

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
