#include "morphdis/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "morphdis/error.hpp"
#include "morphdis/rng.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

Analysis parse_analysis_columns(const std::vector<std::string>& cols, std::size_t offset) {
  Analysis a;
  a.diac = cols.at(offset);
  a.lemma = cols.at(offset + 1);
  for (std::size_t f = 0; f < kNumTags; ++f) a.tags[f] = cols.at(offset + 2 + f);
  return a;
}

void write_analysis_columns(std::ostream& out, const Analysis& a) {
  out << a.diac << '\t' << a.lemma;
  for (const auto& t : a.tags) out << '\t' << t;
}

Corpus parse_corpus(std::istream& in, const std::string& source, const CorpusReadOptions& options) {
  Corpus corpus;
  Sentence current;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (line.empty()) {
      if (current.empty()) throw DataError(source, lineno, "empty sentence (duplicate blank line)");
      corpus.push_back(std::move(current));
      current.clear();
      continue;
    }
    const auto cols = split(line, '\t');
    const bool surface_only = options.gold_optional && cols.size() == 1;
    const bool width_ok = cols.size() == kCorpusColumns ||
                          (options.allow_extra_columns && cols.size() > kCorpusColumns);
    if (!surface_only && !width_ok) {
      throw DataError(source, lineno,
                      "expected " + std::to_string(kCorpusColumns) + " columns, found " +
                          std::to_string(cols.size()));
    }
    if (cols[0].empty()) throw DataError(source, lineno, "empty surface form");
    AnnotatedToken tok;
    tok.surface = cols[0];
    if (!surface_only) {
      tok.gold = parse_analysis_columns(cols, 1);
      for (std::size_t f = 0; f < kNumTags; ++f) {
        if (tok.gold.tags[f].empty()) {
          throw DataError(source, lineno, "empty value for feature '" +
                                              std::string(kTagNames[f]) + "'");
        }
      }
    }
    current.push_back(std::move(tok));
  }
  if (!current.empty()) corpus.push_back(std::move(current));
  return corpus;
}

Corpus parse_corpus(const std::string& path, const CorpusReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  return parse_corpus(in, path, options);
}

void serialize_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) {
      out << tok.surface << '\t';
      write_analysis_columns(out, tok.gold);
      out << '\n';
    }
    out << '\n';
  }
}

void write_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file '" + path + "'");
  serialize_corpus(out, corpus);
}

std::pair<Corpus, Corpus> split_train_tune(const Corpus& corpus, double tune_fraction,
                                           std::uint64_t seed) {
  if (!(tune_fraction > 0.0 && tune_fraction < 1.0)) {
    throw UsageError("tune_fraction must lie in (0, 1)");
  }
  const std::size_t n = corpus.size();
  if (n < 2) throw DataError("need at least 2 sentences to split off a tuning set");
  std::size_t n_tune = static_cast<std::size_t>(std::floor(static_cast<double>(n) * tune_fraction));
  n_tune = std::clamp<std::size_t>(n_tune, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::derive(seed, 0x5711));
  rng.shuffle(order);
  std::vector<bool> is_tune(n, false);
  for (std::size_t i = 0; i < n_tune; ++i) is_tune[order[i]] = true;

  Corpus train, tune;
  for (std::size_t i = 0; i < n; ++i) (is_tune[i] ? tune : train).push_back(corpus[i]);
  return {std::move(train), std::move(tune)};
}

std::size_t token_count(const Corpus& corpus) {
  std::size_t n = 0;
  for (const auto& s : corpus) n += s.size();
  return n;
}

}  // namespace morphdis
