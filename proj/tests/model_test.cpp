#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "morphdis/corpus.hpp"
#include "morphdis/error.hpp"
#include "morphdis/model.hpp"

using namespace morphdis;

namespace {

const std::string kData = MORPHDIS_DATA_DIR;

ModelConfig tiny_config() {
  ModelConfig c;
  c.char_dim = 5;
  c.word_dim = 4;
  c.char_hidden = 5;
  c.char_layers = 1;
  c.tag_dim = 3;
  c.tagger_hidden = 6;
  c.tagger_layers = 2;
  c.head_hidden = 5;
  c.encoder_hidden = 6;
  c.encoder_layers = 2;
  c.decoder_hidden = 6;
  c.decoder_layers = 2;
  c.window = 4;
  c.dropout = 0.0;
  return c;
}

struct Fixture {
  Normalizer normalizer = Normalizer::load(kData + "/micro/normalization.tsv");
  Corpus corpus;
  MorphDictionary dictionary = load_dictionary(kData + "/micro/dictionary.tsv", normalizer);
  std::unique_ptr<JointModel> model;

  explicit Fixture(ModelConfig config = tiny_config(), std::uint64_t seed = 3) {
    const Corpus all = parse_corpus(kData + "/micro/corpus.tsv");
    corpus.assign(all.begin(), all.begin() + 8);
    model = std::make_unique<JointModel>(
        config, build_vocab(corpus, normalizer, dictionary.all_analyses()), normalizer, seed);
  }
  PreparedSentence prepared(std::size_t i) const { return model->prepare(corpus[i], &dictionary, true); }
};

std::vector<TaggerToken> tagger_inputs(const PreparedSentence& p) {
  std::vector<TaggerToken> out;
  for (const auto& t : p.tokens) out.push_back(t.tagger);
  return out;
}

double brute_nll(const Tensor& logits, std::size_t gold) {
  long double mx = logits[0];
  for (double v : logits.storage()) mx = std::max<long double>(mx, v);
  long double z = 0.0L;
  for (double v : logits.storage()) z += std::exp(static_cast<long double>(v) - mx);
  return static_cast<double>(-(logits[gold] - mx - std::log(z)));
}

}  // namespace

TEST(Tagger, LogitShapesFollowTagVocabularies) {
  Fixture fx;
  const PreparedSentence p = fx.prepared(0);
  Graph g;
  const auto logits = fx.model->tagger().forward(g, tagger_inputs(p));
  ASSERT_EQ(logits.size(), p.tokens.size());
  for (const auto& tok : logits) {
    for (std::size_t f = 0; f < kNumTags; ++f) EXPECT_EQ(tok[f].size(), fx.model->vocab().tags[f].size());
  }
}

TEST(Tagger, PredictionsAreArgmaxOfNormalizedDistributions) {
  Fixture fx;
  const PreparedSentence p = fx.prepared(1);
  Graph g;
  const auto logits = fx.model->tagger().forward(g, tagger_inputs(p));
  const TagPrediction pred = predict_tags(logits[0], fx.model->vocab());
  for (std::size_t f = 0; f < kNumTags; ++f) {
    const auto& d = pred.distributions[f];
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-12);
    EXPECT_EQ(pred.ids[f], static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin()));
    EXPECT_EQ(pred.values[f], fx.model->vocab().tags[f][pred.ids[f]]);
  }
}

TEST(Tagger, CandidateEmbeddingIsSumOfValueRows) {
  Fixture fx;
  const auto& tagger = fx.model->tagger();
  Graph g;
  CandidateIds none{};
  const Expr zero = tagger.candidate_embedding(g, none);
  EXPECT_EQ(zero.size(), kNumTags * 3);
  for (double v : zero.value().storage()) EXPECT_EQ(v, 0.0);

  CandidateIds one{}, two{};
  one[0] = {0};
  two[0] = {0, 1};
  const Tensor a = tagger.candidate_embedding(g, one).value();
  const Tensor b = tagger.candidate_embedding(g, two).value();
  const Parameter* table = fx.model->parameters().find("tagger.tag_emb.pos");
  ASSERT_NE(table, nullptr);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a[k], table->value.at(0, k));
    EXPECT_DOUBLE_EQ(b[k], table->value.at(0, k) + table->value.at(1, k));
  }
  for (std::size_t k = 3; k < a.size(); ++k) EXPECT_EQ(a[k], 0.0);
}

TEST(Tagger, LossMatchesBruteForceMeanOverTokens) {
  Fixture fx;
  const PreparedSentence p = fx.prepared(2);
  Graph g;
  const auto logits = fx.model->tagger().forward(g, tagger_inputs(p));
  const auto gold = p.gold_tags();
  const auto losses = tagger_loss(logits, gold);
  for (std::size_t f = 0; f < kNumTags; ++f) {
    double expect = 0.0;
    for (std::size_t t = 0; t < gold.size(); ++t) expect += brute_nll(logits[t][f].value(), gold[t][f]);
    expect /= static_cast<double>(gold.size());
    EXPECT_NEAR(losses[f].scalar(), expect, 1e-12) << kTagNames[f];
  }
}

TEST(Encoder, OneOutputPerWindowPosition) {
  Fixture fx;
  for (std::size_t i = 0; i < fx.corpus.size(); ++i) {
    const PreparedSentence p = fx.prepared(i);
    Graph g;
    for (const auto& tok : p.tokens) {
      const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
      EXPECT_EQ(enc.outputs.size(), tok.window.size());
      EXPECT_EQ(enc.rows.value().rows(), tok.window.size());
      EXPECT_EQ(enc.finals.size(), 2u);
    }
  }
}

TEST(Encoder, SameWordInDifferentContextsDiffers) {
  Fixture fx;
  Sentence a{{"ktb", {}}, {"Aldrs", {}}}, b{{"hw", {}}, {"Aldrs", {}}};
  const PreparedSentence pa = fx.model->prepare(a, &fx.dictionary, false);
  const PreparedSentence pb = fx.model->prepare(b, &fx.dictionary, false);
  Graph g;
  const EncoderOutput ea = fx.model->encoder().encode(g, pa.tokens[1].window);
  const EncoderOutput eb = fx.model->encoder().encode(g, pb.tokens[1].window);
  const Tensor ha = ea.outputs[ea.outputs.size() - 2].value();
  const Tensor hb = eb.outputs[eb.outputs.size() - 2].value();
  EXPECT_FALSE(ha == hb);
}

TEST(Decoder, TeacherForcedLossMatchesStepOracle) {
  Fixture fx;
  const PreparedSentence p = fx.prepared(0);
  const PreparedToken& tok = p.tokens[0];
  Graph g;
  const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
  const Expr cond = fx.model->tagger().tag_conditioning(g, *tok.gold_tags);
  DecodeTrace trace;
  const Decoder& dec = fx.model->decoder(kDiacFeature);
  const Expr loss = decode_train(g, dec, enc, cond, *tok.gold_diac, 0.0, nullptr, &trace);
  std::vector<std::size_t> targets = *tok.gold_diac;
  targets.push_back(kOutputEos);
  EXPECT_EQ(trace.targets, targets);
  ASSERT_EQ(trace.logits.size(), targets.size());
  EXPECT_EQ(trace.fed[0], dec.bos());
  double sum = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (t > 0) EXPECT_EQ(trace.fed[t], targets[t - 1]);
    sum += brute_nll(trace.logits[t], targets[t]);
  }
  EXPECT_NEAR(loss.scalar(), sum / static_cast<double>(targets.size()), 1e-12);
}

TEST(Decoder, AttentionWeightsSumToOne) {
  Fixture fx;
  Rng rng(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const PreparedSentence p = fx.prepared(i);
    for (const auto& tok : p.tokens) {
      Graph g;
      const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
      const Expr cond = fx.model->tagger().tag_conditioning(g, *tok.gold_tags);
      DecodeTrace trace;
      decode_train(g, fx.model->decoder(kLemmaFeature), enc, cond, *tok.gold_lemma, 0.5, &rng, &trace);
      for (const auto& a : trace.attention) {
        EXPECT_EQ(a.size(), tok.window.size());
        double s = 0.0;
        for (double v : a.storage()) s += v;
        EXPECT_NEAR(s, 1.0, 1e-9);
      }
    }
  }
}

TEST(Decoder, FreeRunningFeedsPreviousArgmax) {
  Fixture fx;
  const PreparedToken tok = fx.prepared(0).tokens[1];
  Graph g;
  const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
  const Expr cond = fx.model->tagger().tag_conditioning(g, *tok.gold_tags);
  DecodeTrace trace;
  Rng rng(1);
  const Expr loss =
      decode_train(g, fx.model->decoder(kDiacFeature), enc, cond, *tok.gold_diac, 1.0, &rng, &trace);
  EXPECT_TRUE(std::isfinite(loss.scalar()));
  for (std::size_t t = 1; t < trace.fed.size(); ++t) {
    EXPECT_EQ(trace.fed[t], argmax(trace.logits[t - 1].storage()));
  }
  g.backward(loss);
  double norm = 0.0;
  for (Parameter* p : fx.model->decoder(kDiacFeature).parameters()) {
    for (double v : p->grad.storage()) norm += v * v;
  }
  EXPECT_GT(norm, 0.0);
}

TEST(Decoder, GoldOutsideOutputVocabularyIsRejected) {
  Fixture fx;
  const PreparedToken tok = fx.prepared(0).tokens[0];
  Graph g;
  const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
  const Expr cond = fx.model->tagger().tag_conditioning(g, *tok.gold_tags);
  const std::vector<std::size_t> bad{1, fx.model->decoder(kLemmaFeature).vocab_size() + 3};
  EXPECT_THROW(decode_train(g, fx.model->decoder(kLemmaFeature), enc, cond, bad, 0.0, nullptr), DataError);
}

TEST(Decoder, BeamWidthOneIsGreedyAndWiderIsNoWorse) {
  Fixture fx;
  for (std::size_t i = 0; i < fx.corpus.size(); ++i) {
    const PreparedSentence p = fx.prepared(i);
    Graph g(false, nullptr, false);
    for (const auto& tok : p.tokens) {
      const EncoderOutput enc = fx.model->encoder().encode(g, tok.window);
      const Expr cond = fx.model->tagger().tag_conditioning(g, *tok.gold_tags);
      for (std::size_t f : {kLemmaFeature, kDiacFeature}) {
        const Decoder& dec = fx.model->decoder(f);
        const DecodeResult greedy = decode_greedy(g, dec, enc, cond, 12);
        const DecodeResult b1 = decode_beam(g, dec, enc, cond, 1, 12);
        const DecodeResult b5 = decode_beam(g, dec, enc, cond, 5, 12);
        EXPECT_EQ(greedy.ids, b1.ids);
        EXPECT_EQ(greedy.score, b1.score);
        EXPECT_GE(b5.score, b1.score);
        EXPECT_EQ(greedy.truncated, greedy.ids.size() == 12);
      }
    }
  }
}

TEST(Decoder, TieBreakIsLexicographic) {
  DecodeResult a{{1, 2}, -1.0, -0.5, false}, b{{1, 3}, -1.0, -0.5, false}, c{{0}, -0.2, -0.1, false};
  EXPECT_TRUE(better_result(a, b));
  EXPECT_FALSE(better_result(b, a));
  EXPECT_TRUE(better_result(c, a));
  EXPECT_FALSE(better_result(a, a));
}

TEST(GradientStop, DecoderLossesLeaveTaggerUntouched) {
  Fixture fx;
  auto& store = fx.model->parameters();
  for (std::size_t i = 0; i < 3; ++i) {
    store.zero_grad();
    Graph g;
    const auto parts = fx.model->losses(g, fx.prepared(i), {});
    g.backward(mean(std::vector<Expr>{parts[kLemmaFeature], parts[kDiacFeature]}));
    for (Parameter* p : fx.model->tagger().parameters()) {
      for (double v : p->grad.storage()) ASSERT_EQ(v, 0.0) << p->name;
    }
  }
}

TEST(GradientStop, ForwardValuesIgnoreDetachment) {
  Fixture fx;
  const TagIds ids = *fx.prepared(0).tokens[0].gold_tags;
  Graph g;
  const Expr detached = fx.model->tagger().tag_conditioning(g, ids);
  std::vector<Expr> rows;
  for (std::size_t f = 0; f < kNumTags; ++f) {
    rows.push_back(g.lookup(*fx.model->parameters().find("tagger.tag_emb." + std::string(kTagNames[f])),
                            ids[f]));
  }
  EXPECT_EQ(detached.value(), concat(rows).value());
}

TEST(JointLoss, SharedEmbeddingsReceiveEveryComponent) {
  Fixture fx;
  auto& store = fx.model->parameters();
  const PreparedSentence p = fx.prepared(1);
  std::vector<Parameter*> shared{&fx.model->char_embeddings(), &fx.model->word_embeddings()};
  auto grads_of = [&](const std::function<Expr(Graph&, const std::array<Expr, kNumFeatures>&)>& pick) {
    store.zero_grad();
    Graph g;
    const auto parts = fx.model->losses(g, p, {});
    g.backward(pick(g, parts));
    std::vector<Tensor> out;
    for (Parameter* q : shared) out.push_back(q->grad);
    return out;
  };
  const auto joint = grads_of([](Graph&, const auto& parts) { return joint_loss(parts); });
  std::vector<std::vector<Tensor>> each;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    each.push_back(grads_of([f](Graph&, const auto& parts) { return scale(parts[f], 1.0 / kNumFeatures); }));
  }
  for (std::size_t k = 0; k < shared.size(); ++k) {
    for (std::size_t i = 0; i < joint[k].size(); ++i) {
      double sum = 0.0;
      for (std::size_t f = 0; f < kNumFeatures; ++f) sum += each[f][k][i];
      EXPECT_NEAR(joint[k][i], sum, 1e-12);
    }
  }
  auto nonzero = [](const Tensor& t) {
    return std::any_of(t.storage().begin(), t.storage().end(), [](double v) { return v != 0.0; });
  };
  for (std::size_t f : {std::size_t{0}, kLemmaFeature, kDiacFeature}) {
    EXPECT_TRUE(nonzero(each[f][0])) << feature_name(f);
    EXPECT_TRUE(nonzero(each[f][1])) << feature_name(f);
  }
  store.zero_grad();
}

TEST(JointLoss, Arithmetic) {
  Graph g;
  std::vector<Expr> same, spike;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    same.push_back(g.constant(Tensor::vector({0.75})));
    spike.push_back(g.constant(Tensor::vector({f == 3 ? 1.6 : 0.0})));
  }
  EXPECT_EQ(joint_loss(same).scalar(), 0.75);
  EXPECT_DOUBLE_EQ(joint_loss(spike).scalar(), 0.1);
  EXPECT_THROW(joint_loss(std::span<const Expr>(same).first(15)), ShapeError);
}

TEST(JointLoss, NonFiniteComponentNamesFeature) {
  Graph g;
  std::vector<Expr> parts;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    parts.push_back(g.constant(Tensor::vector({f == kLemmaFeature ? NAN : 0.5})));
  }
  try {
    joint_loss(parts);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("lemma"), std::string::npos);
  }
}

TEST(JointLoss, UniformLearnedWeightsEqualMean) {
  ParameterStore store;
  Parameter& logits = store.add_vector("loss.logits", kNumFeatures);
  Graph g;
  std::vector<Expr> parts;
  for (std::size_t f = 0; f < kNumFeatures; ++f) parts.push_back(g.constant(Tensor::vector({0.1 * f})));
  EXPECT_NEAR(weighted_joint_loss(g, parts, logits).scalar(), joint_loss(parts).scalar(), 1e-15);
}

TEST(Model, PrepareFlagsUnknownWordsAndGold) {
  Fixture fx;
  Sentence s{{"qqqq", {}}, {"hw", {}}};
  const PreparedSentence p = fx.model->prepare(s, &fx.dictionary, false);
  EXPECT_TRUE(p.tokens[0].oov);
  EXPECT_FALSE(p.tokens[1].oov);
  EXPECT_FALSE(p.tokens[0].gold_tags.has_value());
  EXPECT_THROW(fx.model->prepare(s, &fx.dictionary, true), DataError);

  Sentence bad = fx.corpus[0];
  bad[0].gold.tags[0] = "unknown_pos";
  EXPECT_THROW(fx.model->prepare(bad, &fx.dictionary, true), DataError);
  EXPECT_FALSE(fx.model->prepare(bad, &fx.dictionary, false).tokens[0].gold_tags.has_value());
}

TEST(Model, PredictIsDeterministicAndHandlesUnknownWords) {
  Fixture fx;
  Sentence s{{"ktbqrs", {}}, {"Aldrs", {}}};
  const PreparedSentence p = fx.model->prepare(s, &fx.dictionary, false);
  DecodeConfig decode;
  const auto a = fx.model->predict(p, decode);
  const auto b = fx.model->predict(p, decode);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].analysis(), b[j].analysis());
    EXPECT_LE(a[j].diac.ids.size(), decode.max_length_for(p.tokens[j].target_length));
  }
  EXPECT_TRUE(a[0].oov);
}

TEST(Model, ParameterNamesAreUniqueAndOrdered) {
  Fixture fx;
  std::set<std::string> names;
  const auto& store = fx.model->parameters();
  for (const auto& p : store) EXPECT_TRUE(names.insert(p->name).second) << p->name;
  EXPECT_EQ(store[0].name, "emb.char");
  EXPECT_EQ(store[1].name, "emb.word");
  EXPECT_EQ(fx.model->loss_weight_logits(), nullptr);
  ModelConfig learned = tiny_config();
  learned.learned_loss_weights = true;
  Fixture with(learned);
  EXPECT_NE(with.model->loss_weight_logits(), nullptr);
}

TEST(ModelConfig, KeyValueRoundTripAndValidation) {
  ModelConfig c = tiny_config();
  c.tag_every_step = false;
  c.oov_policy = OovPolicy::closed;
  KeyValues kv = c.to_key_values();
  kv["unrelated"] = "1";
  const ModelConfig back = ModelConfig::take(kv);
  EXPECT_EQ(back.to_key_values(), c.to_key_values());
  EXPECT_EQ(kv.size(), 1u);
  ModelConfig bad = c;
  bad.decoder_layers = 3;
  EXPECT_THROW(bad.validate(), UsageError);
  KeyValues junk{{"dropout", "abc"}};
  EXPECT_THROW(ModelConfig::take(junk), UsageError);
}
