#include "morphdis/vocab.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

StringIndex::StringIndex(std::vector<std::string> items) {
  for (auto& s : items) add(s);
}

std::size_t StringIndex::add(const std::string& s) {
  auto [it, inserted] = ids_.emplace(s, items_.size());
  if (inserted) items_.push_back(s);
  return it->second;
}

std::optional<std::size_t> StringIndex::find(std::string_view s) const {
  auto it = ids_.find(std::string(s));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t StringIndex::id_or(std::string_view s, std::size_t fallback) const {
  return find(s).value_or(fallback);
}

namespace {

StringIndex sorted_index(std::vector<std::string> reserved, const std::set<std::string>& values) {
  StringIndex idx(std::move(reserved));
  for (const auto& v : values) idx.add(v);
  return idx;
}

void write_index(std::ostream& out, const std::string& name, const StringIndex& idx) {
  out << name << '\t' << idx.size() << '\n';
  for (const auto& s : idx.items()) out << s << '\n';
}

StringIndex read_index(std::istream& in, const std::string& expected) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("vocabulary: missing section '" + expected + "'");
  const auto cols = split(header, '\t');
  if (cols.size() != 2 || cols[0] != expected) {
    throw DataError("vocabulary: expected section '" + expected + "', found '" + header + "'");
  }
  const std::size_t n = std::stoul(cols[1]);
  std::vector<std::string> items(n);
  for (auto& s : items) {
    if (!std::getline(in, s)) throw DataError("vocabulary: truncated section '" + expected + "'");
  }
  return StringIndex(std::move(items));
}

}  // namespace

void Vocab::write(std::ostream& out) const {
  write_index(out, "chars", chars);
  write_index(out, "words", words);
  for (std::size_t f = 0; f < kNumTags; ++f) write_index(out, "tag:" + std::string(kTagNames[f]), tags[f]);
  write_index(out, "lemma_chars", lemma_chars);
  write_index(out, "diac_chars", diac_chars);
}

Vocab Vocab::read(std::istream& in) {
  Vocab v;
  v.chars = read_index(in, "chars");
  v.words = read_index(in, "words");
  for (std::size_t f = 0; f < kNumTags; ++f) v.tags[f] = read_index(in, "tag:" + std::string(kTagNames[f]));
  v.lemma_chars = read_index(in, "lemma_chars");
  v.diac_chars = read_index(in, "diac_chars");
  return v;
}

Vocab build_vocab(const Corpus& corpus, const Normalizer& normalizer,
                  std::span<const Analysis> extra_analyses) {
  std::set<std::string> chars, words, lemma_chars, diac_chars;
  std::array<std::set<std::string>, kNumTags> tags;
  auto add_analysis = [&](const Analysis& a) {
    for (std::size_t f = 0; f < kNumTags; ++f) {
      if (!a.tags[f].empty()) tags[f].insert(a.tags[f]);
    }
  };
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) {
      const std::string norm = normalizer(tok.surface);
      words.insert(norm);
      for (auto& cp : split_codepoints(norm)) chars.insert(cp);
      for (auto& cp : split_codepoints(tok.gold.lemma)) lemma_chars.insert(cp);
      for (auto& cp : split_codepoints(tok.gold.diac)) diac_chars.insert(cp);
      add_analysis(tok.gold);
    }
  }
  for (const auto& a : extra_analyses) add_analysis(a);

  Vocab v;
  v.chars = sorted_index({"<pad>", "<unk>", "<bos>", "<eos>", "<ws>", "<L>", "<R>"}, chars);
  v.words = sorted_index({"<pad>", "<unk>"}, words);
  for (std::size_t f = 0; f < kNumTags; ++f) v.tags[f] = sorted_index({}, tags[f]);
  v.lemma_chars = sorted_index({"<eos>"}, lemma_chars);
  v.diac_chars = sorted_index({"<eos>"}, diac_chars);
  return v;
}

CharWindow build_window(std::span<const std::string> surfaces, std::size_t target_index,
                        std::size_t width, const Vocab& vocab) {
  if (target_index >= surfaces.size()) {
    throw UsageError("build_window: target index " + std::to_string(target_index) +
                     " out of range for sentence of length " + std::to_string(surfaces.size()));
  }
  struct Item {
    std::size_t ch, word, pos;
  };
  std::vector<Item> stream;
  std::size_t begin = 0, end = 0;
  for (std::size_t k = 0; k < surfaces.size(); ++k) {
    const std::size_t wid = vocab.word_id(surfaces[k]);
    if (k > 0) stream.push_back({sym::kSpace, wid, k});
    if (k == target_index) begin = stream.size();
    for (const auto& cp : split_codepoints(surfaces[k])) stream.push_back({vocab.char_id(cp), wid, k});
    if (k == target_index) end = stream.size();
  }

  CharWindow w;
  auto push = [&](const Item& it) {
    w.chars.push_back(it.ch);
    w.words.push_back(it.word);
    w.positions.push_back(it.pos);
  };
  const std::size_t target_word = vocab.word_id(surfaces[target_index]);
  for (std::size_t i = begin > width ? begin - width : 0; i < begin; ++i) push(stream[i]);
  w.left_marker = w.chars.size();
  push({sym::kLeft, target_word, target_index});
  for (std::size_t i = begin; i < end; ++i) push(stream[i]);
  w.right_marker = w.chars.size();
  push({sym::kRight, target_word, target_index});
  for (std::size_t i = end; i < std::min(stream.size(), end + width); ++i) push(stream[i]);
  return w;
}

}  // namespace morphdis
