#include "morphdis/tagger.hpp"

#include "morphdis/error.hpp"

namespace morphdis {

CandidateIds candidate_ids(const CandidateTagSets& sets, const Vocab& vocab) {
  CandidateIds ids;
  for (std::size_t f = 0; f < kNumTags; ++f) {
    for (const auto& v : sets.values[f]) {
      if (auto id = vocab.tags[f].find(v)) ids[f].push_back(*id);
    }
  }
  return ids;
}

Tagger::Tagger(ParameterStore& store, const ModelConfig& config, const Vocab& vocab,
               Parameter& char_emb, Parameter& word_emb, Rng& rng)
    : config_(config), char_emb_(&char_emb), word_emb_(&word_emb) {
  const std::size_t before = store.size();
  char_lstm_ = LstmStack::create(store, "tagger.char_lstm", config.char_dim, config.char_hidden,
                                 config.char_layers, false, rng);
  for (std::size_t f = 0; f < kNumTags; ++f) {
    const std::size_t n = std::max<std::size_t>(vocab.tags[f].size(), 1);
    tag_emb_[f] = &store.add_matrix("tagger.tag_emb." + std::string(kTagNames[f]), n, config.tag_dim, rng);
  }
  std::size_t input = config.word_dim + config.char_hidden;
  if (config.use_analyzer) input += kNumTags * config.tag_dim;
  context_ = BiLstm::create(store, "tagger.bilstm", input, config.tagger_hidden, config.tagger_layers,
                            true, rng);
  for (std::size_t f = 0; f < kNumTags; ++f) {
    const std::string name = "tagger.head." + std::string(kTagNames[f]);
    const std::size_t classes = std::max<std::size_t>(vocab.tags[f].size(), 1);
    hidden_[f] = Linear::create(store, name + ".hidden", context_.output_size(), config.head_hidden, rng);
    output_[f] = Linear::create(store, name + ".out", config.head_hidden, classes, rng);
  }
  for (std::size_t i = before; i < store.size(); ++i) owned_.push_back(&store[i]);
}

Expr Tagger::char_summary(Graph& g, std::span<const std::size_t> chars) const {
  if (chars.empty()) throw ShapeError("char_summary: empty word");
  std::vector<Expr> xs;
  xs.reserve(chars.size());
  for (std::size_t c : chars) xs.push_back(g.lookup(*char_emb_, c));
  return char_lstm_.run(g, xs, config_.dropout).back().h;
}

Expr Tagger::candidate_embedding(Graph& g, const CandidateIds& candidates) const {
  std::vector<Expr> parts;
  for (std::size_t f = 0; f < kNumTags; ++f) {
    if (candidates[f].empty()) {
      parts.push_back(g.constant(Tensor({config_.tag_dim})));
      continue;
    }
    std::vector<Expr> rows;
    for (std::size_t id : candidates[f]) rows.push_back(g.lookup(*tag_emb_[f], id));
    parts.push_back(rows.size() == 1 ? rows.front() : sum(rows));
  }
  return concat(parts);
}

Expr Tagger::token_representation(Graph& g, const TaggerToken& token) const {
  std::vector<Expr> parts{g.lookup(*word_emb_, token.word), char_summary(g, token.chars)};
  if (config_.use_analyzer) parts.push_back(candidate_embedding(g, token.candidates));
  return concat(parts);
}

std::vector<std::array<Expr, kNumTags>> Tagger::forward(Graph& g,
                                                        std::span<const TaggerToken> tokens) const {
  std::vector<Expr> inputs;
  inputs.reserve(tokens.size());
  for (const auto& t : tokens) inputs.push_back(token_representation(g, t));
  BiLstmOutput ctx = context_.run(g, inputs, config_.dropout);
  std::vector<std::array<Expr, kNumTags>> logits(tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    Expr h = dropout(ctx.outputs[j], config_.dropout);
    for (std::size_t f = 0; f < kNumTags; ++f) logits[j][f] = output_[f](g, tanh(hidden_[f](g, h)));
  }
  return logits;
}

Expr Tagger::tag_conditioning(Graph& g, const TagIds& ids) const {
  std::vector<Expr> parts;
  for (std::size_t f = 0; f < kNumTags; ++f) parts.push_back(detach(g.lookup(*tag_emb_[f], ids[f])));
  return concat(parts);
}

std::vector<Parameter*> Tagger::parameters() const { return owned_; }

TagPrediction predict_tags(const std::array<Expr, kNumTags>& logits, const Vocab& vocab) {
  TagPrediction p;
  for (std::size_t f = 0; f < kNumTags; ++f) {
    p.distributions[f] = softmax_values(logits[f].value().data());
    p.ids[f] = argmax(p.distributions[f]);
    p.values[f] = vocab.tags[f].size() > p.ids[f] ? vocab.tags[f][p.ids[f]] : std::string();
  }
  return p;
}

std::array<Expr, kNumTags> tagger_loss(const std::vector<std::array<Expr, kNumTags>>& logits,
                                       std::span<const TagIds> gold) {
  if (logits.size() != gold.size() || logits.empty()) {
    throw ShapeError("tagger_loss: " + std::to_string(logits.size()) + " predictions for " +
                     std::to_string(gold.size()) + " gold tokens");
  }
  std::array<Expr, kNumTags> out;
  for (std::size_t f = 0; f < kNumTags; ++f) {
    std::vector<Expr> per_token;
    for (std::size_t j = 0; j < logits.size(); ++j) {
      per_token.push_back(pick_neg_log_softmax(logits[j][f], gold[j][f]));
    }
    out[f] = mean(per_token);
  }
  return out;
}

}  // namespace morphdis
