#include "morphdis/gradient_suite.hpp"

#include <chrono>

#include "morphdis/layers.hpp"
#include "morphdis/model.hpp"

namespace morphdis {

namespace {

Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape) {
  Tensor t(std::move(shape));
  for (double& v : t.storage()) v = rng.uniform(-1.0, 1.0);
  return t;
}

std::vector<Parameter*> all_of(ParameterStore& store) {
  std::vector<Parameter*> out;
  for (auto& p : store) out.push_back(p.get());
  return out;
}

// Peephole weights start at zero; give them values so their paths are live.
void randomize_peepholes(ParameterStore& store, Rng& rng) {
  for (auto& p : store) {
    if (p->name.find("peep") != std::string::npos) {
      for (double& v : p->value.storage()) v = rng.uniform(-0.5, 0.5);
    }
  }
}

ComponentCheck timed(const std::string& name, std::span<Parameter* const> params,
                     const ScalarLossFn& loss) {
  const auto start = std::chrono::steady_clock::now();
  ComponentCheck c;
  c.component = name;
  c.report = grad_check(params, loss, kGradientTolerance);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

Analysis fixture_analysis(const char* diac, const char* lemma, const char* pos, const char* cas) {
  Analysis a;
  a.diac = diac;
  a.lemma = lemma;
  a.tags.fill("na");
  a.tags[0] = pos;
  a.tags[*tag_index("cas")] = cas;
  return a;
}

ModelConfig fixture_config() {
  ModelConfig c;
  c.char_dim = 3;
  c.word_dim = 3;
  c.char_hidden = 3;
  c.char_layers = 1;
  c.tag_dim = 2;
  c.tagger_hidden = 3;
  c.tagger_layers = 2;
  c.head_hidden = 3;
  c.encoder_hidden = 3;
  c.encoder_layers = 2;
  c.decoder_hidden = 3;
  c.decoder_layers = 2;
  c.window = 2;
  return c;
}

}  // namespace

Sentence gradient_fixture_sentence() {
  return {
      {"ktb", fixture_analysis("kataba", "kataba", "verb", "na")},
      {"Alwld", fixture_analysis("Alwaladu", "walad", "noun", "n")},
      {"drsA", fixture_analysis("darsAF", "dars", "noun", "a")},
  };
}

std::vector<ComponentCheck> run_gradient_suite(std::uint64_t seed) {
  std::vector<ComponentCheck> out;
  Rng rng(seed);

  {
    ParameterStore store;
    Parameter& table = store.add_matrix("emb", 6, 4, rng);
    Linear head = Linear::create(store, "head", 4, 3, rng);
    auto loss = [&](bool backprop) {
      Graph g;
      Expr x = tanh(g.lookup(table, 2) + g.lookup(table, 5));
      Expr l = pick_neg_log_softmax(head(g, x), 1);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    std::vector<Parameter*> params{&table};
    out.push_back(timed("embedding", params, loss));
  }
  {
    ParameterStore store;
    Linear lin = Linear::create(store, "lin", 5, 4, rng);
    for (double& v : lin.bias->value.storage()) v = rng.uniform(-0.5, 0.5);
    const Tensor x = random_tensor(rng, {5});
    auto loss = [&](bool backprop) {
      Graph g;
      Expr l = pick_neg_log_softmax(tanh(lin(g, g.constant(x))), 3);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    out.push_back(timed("linear", all_of(store), loss));
  }
  {
    ParameterStore store;
    LstmCell cell = LstmCell::create(store, "cell", 4, 5, true, rng);
    randomize_peepholes(store, rng);
    Linear head = Linear::create(store, "head", 5, 3, rng);
    const Tensor x = random_tensor(rng, {4});
    const Tensor h0 = random_tensor(rng, {5});
    const Tensor c0 = random_tensor(rng, {5});
    auto loss = [&](bool backprop) {
      Graph g;
      LstmState s{g.constant(h0), g.constant(c0)};
      LstmState next = cell.step(g, g.constant(x), s);
      Expr l = pick_neg_log_softmax(head(g, next.h + next.c), 0);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    out.push_back(timed("lstm_step", all_of(store), loss));
  }
  {
    ParameterStore store;
    BiLstm bi = BiLstm::create(store, "bilstm", 3, 4, 2, true, rng);
    randomize_peepholes(store, rng);
    Linear head = Linear::create(store, "head", 8, 3, rng);
    std::vector<Tensor> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(random_tensor(rng, {3}));
    auto loss = [&](bool backprop) {
      Graph g;
      std::vector<Expr> inputs;
      for (const auto& x : xs) inputs.push_back(g.constant(x));
      BiLstmOutput o = bi.run(g, inputs, 0.0);
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < o.outputs.size(); ++i) {
        terms.push_back(pick_neg_log_softmax(head(g, o.outputs[i]), i % 3));
      }
      Expr l = mean(terms);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    out.push_back(timed("bilstm_2layer", all_of(store), loss));
  }
  {
    ParameterStore store;
    Parameter& w = store.add_matrix("attn", 4, 5, rng);
    Parameter& state = store.add("state", random_tensor(rng, {4}));
    Parameter& rows = store.add("rows", random_tensor(rng, {6, 5}));
    Linear head = Linear::create(store, "head", 5, 3, rng);
    auto loss = [&](bool backprop) {
      Graph g;
      Expr h = g.param(rows);
      Expr a = luong_attention(g.param(w), g.param(state), h);
      Expr context = matvec_t(h, a);
      Expr l = pick_neg_log_softmax(head(g, context), 2);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    out.push_back(timed("attention", all_of(store), loss));
  }

  const Sentence sentence = gradient_fixture_sentence();
  const Corpus corpus{sentence};
  const Normalizer normalizer = Normalizer::identity();
  JointModel model(fixture_config(), build_vocab(corpus, normalizer), normalizer, seed);
  randomize_peepholes(model.parameters(), rng);
  const PreparedSentence prepared = model.prepare(sentence, nullptr, true);
  {
    auto loss = [&](bool backprop) {
      Graph g;
      std::vector<TaggerToken> inputs;
      for (const auto& t : prepared.tokens) inputs.push_back(t.tagger);
      const auto parts = tagger_loss(model.tagger().forward(g, inputs), prepared.gold_tags());
      Expr l = mean(parts);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    std::vector<Parameter*> params = model.tagger().parameters();
    params.push_back(&model.char_embeddings());
    params.push_back(&model.word_embeddings());
    out.push_back(timed("tagger_loss", params, loss));
  }
  {
    const auto gold = prepared.gold_tags();
    auto loss = [&](bool backprop) {
      Graph g;
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < prepared.tokens.size(); ++j) {
        const PreparedToken& tok = prepared.tokens[j];
        EncoderOutput enc = model.encoder().encode(g, tok.window);
        std::optional<Expr> cond = model.tagger().tag_conditioning(g, gold[j]);
        terms.push_back(decode_train(g, model.decoder(kLemmaFeature), enc, cond, *tok.gold_lemma, 0.0,
                                     nullptr));
        terms.push_back(decode_train(g, model.decoder(kDiacFeature), enc, cond, *tok.gold_diac, 0.0,
                                     nullptr));
      }
      Expr l = mean(terms);
      if (backprop) g.backward(l);
      return l.scalar();
    };
    std::vector<Parameter*> params = model.encoder().parameters();
    for (std::size_t f : {kLemmaFeature, kDiacFeature}) {
      for (Parameter* p : model.decoder(f).parameters()) params.push_back(p);
    }
    params.push_back(&model.char_embeddings());
    params.push_back(&model.word_embeddings());
    out.push_back(timed("decoder_loss", params, loss));
  }
  return out;
}

}  // namespace morphdis
