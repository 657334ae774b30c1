#include "morphdis/model.hpp"

#include <cmath>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

std::vector<TagIds> PreparedSentence::gold_tags() const {
  std::vector<TagIds> out;
  for (const auto& t : tokens) {
    if (!t.gold_tags) throw DataError("token '" + t.surface + "' has no gold tags");
    out.push_back(*t.gold_tags);
  }
  return out;
}

Analysis TokenPrediction::analysis() const {
  Analysis a;
  a.diac = diac_text;
  a.lemma = lemma_text;
  a.tags = tags.values;
  return a;
}

JointModel::JointModel(ModelConfig config, Vocab vocab, Normalizer normalizer, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), normalizer_(std::move(normalizer)) {
  config_.validate();
  Rng rng(Rng::derive(seed, 0x1417));
  char_emb_ = &store_.add_matrix("emb.char", vocab_.chars.size(), config_.char_dim, rng);
  word_emb_ = &store_.add_matrix("emb.word", vocab_.words.size(), config_.word_dim, rng);
  tagger_ = Tagger(store_, config_, vocab_, *char_emb_, *word_emb_, rng);
  encoder_ = Encoder(store_, config_, *char_emb_, *word_emb_, rng);
  const std::size_t cond = config_.tag_conditioning ? tagger_.conditioning_size() : 0;
  lemma_decoder_ = Decoder(store_, "lemma_dec", config_, vocab_.lemma_chars.size(),
                           encoder_.output_size(), cond, rng);
  diac_decoder_ = Decoder(store_, "diac_dec", config_, vocab_.diac_chars.size(),
                          encoder_.output_size(), cond, rng);
  if (config_.learned_loss_weights) loss_logits_ = &store_.add_vector("loss.logits", kNumFeatures);
}

namespace {

std::optional<std::vector<std::size_t>> output_ids(const std::string& text, const StringIndex& alphabet,
                                                   bool require, std::string_view what) {
  std::vector<std::size_t> ids;
  for (const auto& cp : split_codepoints(text)) {
    auto id = alphabet.find(cp);
    if (!id || *id == kOutputEos) {
      if (require) {
        throw DataError("gold " + std::string(what) + " '" + text + "' has character '" + cp +
                        "' outside the output vocabulary");
      }
      return std::nullopt;
    }
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace

PreparedSentence JointModel::prepare(const Sentence& sentence, const MorphDictionary* dictionary,
                                     bool require_gold) const {
  PreparedSentence out;
  std::vector<std::string> surfaces;
  for (const auto& tok : sentence) surfaces.push_back(normalizer_(tok.surface));
  static const MorphDictionary kEmpty;
  const MorphDictionary& dict = dictionary != nullptr ? *dictionary : kEmpty;

  for (std::size_t j = 0; j < sentence.size(); ++j) {
    PreparedToken p;
    p.surface = surfaces[j];
    p.tagger.word = vocab_.word_id(p.surface);
    for (const auto& cp : split_codepoints(p.surface)) p.tagger.chars.push_back(vocab_.char_id(cp));
    p.target_length = p.tagger.chars.size();
    const CandidateTagSets sets = candidates(dict, p.surface, vocab_, config_.oov_policy);
    p.oov = sets.oov;
    p.tagger.candidates = candidate_ids(sets, vocab_);
    p.window = build_window(surfaces, j, config_.window, vocab_);

    const Analysis& gold = sentence[j].gold;
    const bool has_gold = !gold.tags[0].empty();
    if (has_gold) {
      TagIds ids{};
      bool complete = true;
      for (std::size_t f = 0; f < kNumTags; ++f) {
        auto id = vocab_.tags[f].find(gold.tags[f]);
        if (!id) {
          if (require_gold) {
            throw DataError("gold value '" + gold.tags[f] + "' of feature '" +
                            std::string(kTagNames[f]) + "' is not in the tag vocabulary");
          }
          complete = false;
          break;
        }
        ids[f] = *id;
      }
      if (complete) p.gold_tags = ids;
      p.gold_lemma = output_ids(gold.lemma, vocab_.lemma_chars, require_gold, "lemma");
      p.gold_diac = output_ids(gold.diac, vocab_.diac_chars, require_gold, "diac");
    } else if (require_gold) {
      throw DataError("token '" + sentence[j].surface + "' has no gold analysis");
    }
    out.tokens.push_back(std::move(p));
  }
  return out;
}

std::array<Expr, kNumFeatures> JointModel::losses(Graph& g, const PreparedSentence& sentence,
                                                  const LossOptions& options) const {
  std::vector<TaggerToken> inputs;
  for (const auto& t : sentence.tokens) inputs.push_back(t.tagger);
  const auto logits = tagger_.forward(g, inputs);
  const auto gold = sentence.gold_tags();
  const auto tag_losses = tagger_loss(logits, gold);

  std::vector<Expr> lemma_losses, diac_losses;
  for (std::size_t j = 0; j < sentence.tokens.size(); ++j) {
    const PreparedToken& tok = sentence.tokens[j];
    if (!tok.gold_lemma || !tok.gold_diac) throw DataError("token '" + tok.surface + "' lacks gold lemma/diac");
    std::optional<Expr> cond;
    if (config_.tag_conditioning) {
      TagIds ids{};
      if (options.gold_tag_conditioning) {
        ids = gold[j];
      } else {
        for (std::size_t f = 0; f < kNumTags; ++f) ids[f] = argmax(logits[j][f].value().data());
      }
      cond = tagger_.tag_conditioning(g, ids);
    }
    EncoderOutput enc = encoder_.encode(g, tok.window);
    lemma_losses.push_back(decode_train(g, lemma_decoder_, enc, cond, *tok.gold_lemma,
                                        options.sampling_probability, options.rng));
    diac_losses.push_back(decode_train(g, diac_decoder_, enc, cond, *tok.gold_diac,
                                       options.sampling_probability, options.rng));
  }
  std::array<Expr, kNumFeatures> out;
  for (std::size_t f = 0; f < kNumTags; ++f) out[f] = tag_losses[f];
  out[kLemmaFeature] = mean(lemma_losses);
  out[kDiacFeature] = mean(diac_losses);
  return out;
}

std::vector<TokenPrediction> JointModel::predict(const PreparedSentence& sentence,
                                                 const DecodeConfig& decode) const {
  Graph g(false, nullptr, false);
  std::vector<TaggerToken> inputs;
  for (const auto& t : sentence.tokens) inputs.push_back(t.tagger);
  const auto logits = tagger_.forward(g, inputs);
  std::vector<TokenPrediction> out;
  for (std::size_t j = 0; j < sentence.tokens.size(); ++j) {
    const PreparedToken& tok = sentence.tokens[j];
    TokenPrediction p;
    p.tags = predict_tags(logits[j], vocab_);
    p.oov = tok.oov;
    std::optional<Expr> cond;
    if (config_.tag_conditioning) cond = tagger_.tag_conditioning(g, p.tags.ids);
    EncoderOutput enc = encoder_.encode(g, tok.window);
    const std::size_t max_len = decode.max_length_for(tok.target_length);
    p.lemma = decode_beam(g, lemma_decoder_, enc, cond, decode.beam_width, max_len);
    p.diac = decode_beam(g, diac_decoder_, enc, cond, decode.beam_width, max_len);
    p.lemma_text = ids_to_string(p.lemma.ids, vocab_.lemma_chars);
    p.diac_text = ids_to_string(p.diac.ids, vocab_.diac_chars);
    out.push_back(std::move(p));
  }
  return out;
}

Expr joint_loss(std::span<const Expr> components) {
  if (components.size() != kNumFeatures) {
    throw ShapeError("joint_loss expects " + std::to_string(kNumFeatures) + " components, got " +
                     std::to_string(components.size()));
  }
  for (std::size_t f = 0; f < components.size(); ++f) {
    if (!std::isfinite(components[f].scalar())) {
      throw NumericError("non-finite loss for feature '" + std::string(feature_name(f)) + "'");
    }
  }
  return mean(components);
}

Expr weighted_joint_loss(Graph& g, std::span<const Expr> components, Parameter& logits) {
  joint_loss(components);  // validates
  Expr weights = softmax(g.param(logits));
  return dot(concat(components), weights);
}

}  // namespace morphdis
