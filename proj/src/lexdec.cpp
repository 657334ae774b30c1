#include "morphdis/lexdec.hpp"

#include <algorithm>
#include <cmath>

#include "morphdis/error.hpp"

namespace morphdis {

Encoder::Encoder(ParameterStore& store, const ModelConfig& config, Parameter& char_emb,
                 Parameter& word_emb, Rng& rng)
    : config_(config), char_emb_(&char_emb), word_emb_(&word_emb) {
  const std::size_t before = store.size();
  bilstm_ = BiLstm::create(store, "encoder", config.char_dim + config.word_dim, config.encoder_hidden,
                           config.encoder_layers, false, rng);
  for (std::size_t i = before; i < store.size(); ++i) owned_.push_back(&store[i]);
}

EncoderOutput Encoder::encode(Graph& g, const CharWindow& window) const {
  if (window.size() == 0) throw ShapeError("encode: empty window");
  std::vector<Expr> inputs;
  inputs.reserve(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Expr parts[] = {g.lookup(*char_emb_, window.chars[i]), g.lookup(*word_emb_, window.words[i])};
    inputs.push_back(concat(parts));
  }
  BiLstmOutput out = bilstm_.run(g, inputs, config_.dropout);
  EncoderOutput enc;
  enc.outputs.reserve(out.outputs.size());
  for (const Expr& h : out.outputs) enc.outputs.push_back(dropout(h, config_.dropout));
  enc.rows = stack_rows(enc.outputs);
  enc.finals = std::move(out.finals);
  return enc;
}

Decoder::Decoder(ParameterStore& store, const std::string& name, const ModelConfig& config,
                 std::size_t output_vocab, std::size_t encoder_size, std::size_t conditioning_size,
                 Rng& rng)
    : config_(config), vocab_size_(output_vocab), conditioning_size_(conditioning_size) {
  const std::size_t before = store.size();
  embedding_ = &store.add_matrix(name + ".emb", output_vocab + 1, config.char_dim, rng);
  for (std::size_t l = 0; l < config.decoder_layers; ++l) {
    bridge_.push_back(Linear::create(store, name + ".bridge" + std::to_string(l),
                                     2 * config.encoder_hidden, config.decoder_hidden, rng));
  }
  lstm_ = LstmStack::create(store, name + ".lstm", config.char_dim + encoder_size + conditioning_size,
                            config.decoder_hidden, config.decoder_layers, false, rng);
  attention_ = &store.add_matrix(name + ".attn", config.decoder_hidden, encoder_size, rng);
  combine_ = Linear::create(store, name + ".combine", config.decoder_hidden + encoder_size,
                            config.decoder_hidden, rng);
  output_ = Linear::create(store, name + ".out", config.decoder_hidden, output_vocab, rng);
  for (std::size_t i = before; i < store.size(); ++i) owned_.push_back(&store[i]);
}

Decoder::State Decoder::initial_state(Graph& g, const EncoderOutput& enc) const {
  State s;
  for (std::size_t l = 0; l < bridge_.size(); ++l) {
    const Expr finals[] = {enc.finals[l].first.h, enc.finals[l].second.h};
    Expr h = tanh(bridge_[l](g, concat(finals)));
    s.layers.push_back({h, g.constant(Tensor({config_.decoder_hidden}))});
  }
  s.context = g.constant(Tensor({enc.rows.value().cols()}));
  return s;
}

Decoder::Step Decoder::step(Graph& g, const EncoderOutput& enc, State& state, std::size_t prev_symbol,
                            const std::optional<Expr>& conditioning) const {
  std::vector<Expr> parts{g.lookup(*embedding_, prev_symbol), state.context};
  if (conditioning_size_ > 0) {
    if (!conditioning) throw UsageError("decoder expects tag conditioning input");
    if (config_.tag_every_step || state.steps == 0) {
      parts.push_back(*conditioning);
    } else {
      parts.push_back(g.constant(Tensor({conditioning_size_})));
    }
  }
  Expr top = lstm_.step(g, concat(parts), state.layers, config_.dropout);
  Expr weights = luong_attention(g.param(*attention_), top, enc.rows);
  Expr context = matvec_t(enc.rows, weights);
  const Expr joined[] = {top, context};
  Expr attentional = tanh(combine_(g, concat(joined)));
  state.context = context;
  ++state.steps;
  return {output_(g, dropout(attentional, config_.dropout)), weights};
}

Expr decode_train(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                  const std::optional<Expr>& conditioning, std::span<const std::size_t> gold,
                  double sampling_probability, Rng* rng, DecodeTrace* trace) {
  for (std::size_t id : gold) {
    if (id == kOutputEos || id >= decoder.vocab_size()) {
      throw DataError("gold output symbol " + std::to_string(id) + " is outside the output vocabulary");
    }
  }
  if (sampling_probability > 0.0 && sampling_probability < 1.0 && rng == nullptr) {
    throw UsageError("scheduled sampling requires a random generator");
  }
  Decoder::State state = decoder.initial_state(g, enc);
  std::vector<Expr> losses;
  std::size_t prev = decoder.bos();
  for (std::size_t t = 0; t <= gold.size(); ++t) {
    const std::size_t target = t < gold.size() ? gold[t] : kOutputEos;
    Decoder::Step s = decoder.step(g, enc, state, prev, conditioning);
    losses.push_back(pick_neg_log_softmax(s.logits, target));
    if (trace != nullptr) {
      trace->logits.push_back(s.logits.value());
      trace->attention.push_back(s.attention.value());
      trace->fed.push_back(prev);
      trace->targets.push_back(target);
    }
    bool use_prediction = false;
    if (sampling_probability >= 1.0) {
      use_prediction = true;
    } else if (sampling_probability > 0.0) {
      use_prediction = rng->bernoulli(sampling_probability);
    }
    prev = use_prediction ? argmax(s.logits.value().data()) : target;
  }
  return mean(losses);
}

namespace {

std::vector<double> log_softmax_values(const Tensor& logits) {
  const auto& l = logits.storage();
  const double mx = *std::max_element(l.begin(), l.end());
  double z = 0.0;
  for (double v : l) z += std::exp(v - mx);
  const double lz = mx + std::log(z);
  std::vector<double> out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) out[i] = l[i] - lz;
  return out;
}

}  // namespace

bool better_result(const DecodeResult& a, const DecodeResult& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::lexicographical_compare(a.ids.begin(), a.ids.end(), b.ids.begin(), b.ids.end());
}

DecodeResult decode_greedy(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                           const std::optional<Expr>& conditioning, std::size_t max_length) {
  Decoder::State state = decoder.initial_state(g, enc);
  DecodeResult r;
  std::size_t prev = decoder.bos();
  for (std::size_t t = 0; t < max_length; ++t) {
    Decoder::Step s = decoder.step(g, enc, state, prev, conditioning);
    const auto lp = log_softmax_values(s.logits.value());
    const std::size_t best = argmax(lp);
    r.log_prob += lp[best];
    if (best == kOutputEos) {
      r.score = r.log_prob / static_cast<double>(r.ids.size() + 1);
      return r;
    }
    r.ids.push_back(best);
    prev = best;
  }
  r.truncated = true;
  r.score = r.log_prob / static_cast<double>(std::max<std::size_t>(r.ids.size(), 1));
  return r;
}

DecodeResult decode_beam(Graph& g, const Decoder& decoder, const EncoderOutput& enc,
                         const std::optional<Expr>& conditioning, std::size_t beam_width,
                         std::size_t max_length) {
  if (beam_width == 0) throw UsageError("beam_width must be at least 1");
  struct Hyp {
    std::vector<std::size_t> ids;
    double log_prob = 0.0;
    Decoder::State state;
  };
  struct Candidate {
    std::size_t parent;
    std::size_t symbol;
    double log_prob;
  };

  std::vector<Hyp> live(1);
  live[0].state = decoder.initial_state(g, enc);
  std::vector<DecodeResult> finished;

  for (std::size_t t = 0; t < max_length && !live.empty(); ++t) {
    std::vector<Candidate> cands;
    for (std::size_t h = 0; h < live.size(); ++h) {
      const std::size_t prev = live[h].ids.empty() ? decoder.bos() : live[h].ids.back();
      Decoder::Step s = decoder.step(g, enc, live[h].state, prev, conditioning);
      const auto lp = log_softmax_values(s.logits.value());
      for (std::size_t c = 0; c < lp.size(); ++c) cands.push_back({h, c, live[h].log_prob + lp[c]});
    }
    // Same length for every candidate, so raw and normalized order agree.
    auto cand_less = [&](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      const auto& pa = live[a.parent].ids;
      const auto& pb = live[b.parent].ids;
      if (pa != pb) return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
      return a.symbol < b.symbol;
    };
    const std::size_t keep = std::min(beam_width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      cand_less);
    std::vector<Hyp> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = cands[k];
      if (c.symbol == kOutputEos) {
        DecodeResult r;
        r.ids = live[c.parent].ids;
        r.log_prob = c.log_prob;
        r.score = c.log_prob / static_cast<double>(r.ids.size() + 1);
        finished.push_back(std::move(r));
      } else {
        Hyp h{live[c.parent].ids, c.log_prob, live[c.parent].state};
        h.ids.push_back(c.symbol);
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
    if (finished.size() >= beam_width) break;
  }

  DecodeResult best;
  if (!finished.empty()) {
    best = *std::min_element(finished.begin(), finished.end(), better_result);
  } else {
    const Hyp& top = live.front();
    best.ids = top.ids;
    best.log_prob = top.log_prob;
    best.score = top.log_prob / static_cast<double>(std::max<std::size_t>(top.ids.size(), 1));
    best.truncated = true;
  }
  if (beam_width > 1) {
    DecodeResult greedy = decode_greedy(g, decoder, enc, conditioning, max_length);
    if (better_result(greedy, best)) best = std::move(greedy);
  }
  return best;
}

std::string ids_to_string(std::span<const std::size_t> ids, const StringIndex& alphabet) {
  std::string out;
  for (std::size_t id : ids) {
    if (id != kOutputEos && id < alphabet.size()) out += alphabet[id];
  }
  return out;
}

}  // namespace morphdis
