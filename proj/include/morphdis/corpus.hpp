#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "morphdis/schema.hpp"

namespace morphdis {

// Corpus TSV: surface, diac, lemma, then the 14 tags in schema order.
inline constexpr std::size_t kCorpusColumns = 3 + kNumTags;

struct CorpusReadOptions {
  // Accept surface-only lines (analysis left empty), as for raw input to
  // the disambiguator.
  bool gold_optional = false;
  // Accept trailing columns beyond the 17 (system output with scores).
  bool allow_extra_columns = false;
};

Corpus parse_corpus(const std::string& path, const CorpusReadOptions& options = {});
Corpus parse_corpus(std::istream& in, const std::string& source,
                    const CorpusReadOptions& options = {});

// Parses one TSV analysis row (16 columns: diac, lemma, tags).
Analysis parse_analysis_columns(const std::vector<std::string>& cols, std::size_t offset);
void write_analysis_columns(std::ostream& out, const Analysis& a);

void serialize_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::string& path, const Corpus& corpus);

// Sentence-level split. Tune size is floor(n * fraction), at least 1 and at
// most n - 1; both halves keep corpus order.
std::pair<Corpus, Corpus> split_train_tune(const Corpus& corpus, double tune_fraction,
                                           std::uint64_t seed);

std::size_t token_count(const Corpus& corpus);

}  // namespace morphdis
