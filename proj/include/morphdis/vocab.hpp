#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphdis/normalizer.hpp"
#include "morphdis/schema.hpp"

namespace morphdis {

// Dense string <-> id map; ids are assigned in insertion order from 0.
class StringIndex {
 public:
  StringIndex() = default;
  explicit StringIndex(std::vector<std::string> items);

  std::size_t add(const std::string& s);
  std::optional<std::size_t> find(std::string_view s) const;
  std::size_t id_or(std::string_view s, std::size_t fallback) const;
  const std::string& operator[](std::size_t id) const { return items_.at(id); }
  std::size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }

  friend bool operator==(const StringIndex& a, const StringIndex& b) { return a.items_ == b.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Reserved input-character ids.
namespace sym {
inline constexpr std::size_t kPad = 0;
inline constexpr std::size_t kUnk = 1;
inline constexpr std::size_t kBos = 2;
inline constexpr std::size_t kEos = 3;
inline constexpr std::size_t kSpace = 4;   // whitespace between words
inline constexpr std::size_t kLeft = 5;    // opens the target word
inline constexpr std::size_t kRight = 6;   // closes the target word
inline constexpr std::size_t kReservedChars = 7;
}  // namespace sym

inline constexpr std::size_t kWordPad = 0;
inline constexpr std::size_t kWordUnk = 1;

// Output alphabets: id 0 is EOS, then characters in code-point order, so
// comparing id sequences orders outputs like their strings.
inline constexpr std::size_t kOutputEos = 0;

struct Vocab {
  StringIndex chars;
  StringIndex words;
  std::array<StringIndex, kNumTags> tags;
  StringIndex lemma_chars;
  StringIndex diac_chars;

  std::size_t char_id(std::string_view cp) const { return chars.id_or(cp, sym::kUnk); }
  std::size_t word_id(std::string_view w) const { return words.id_or(w, kWordUnk); }
  const StringIndex& output(std::size_t lexical_feature) const {
    return lexical_feature == kLemmaFeature ? lemma_chars : diac_chars;
  }

  void write(std::ostream& out) const;
  static Vocab read(std::istream& in);

  friend bool operator==(const Vocab&, const Vocab&) = default;
};

// Input characters and words come from normalized surfaces; tag values
// from the corpus plus any extra analyses (dictionary); output alphabets
// from the raw gold lemma and diac strings.
Vocab build_vocab(const Corpus& corpus, const Normalizer& normalizer,
                  std::span<const Analysis> extra_analyses = {});

// Character ids (with boundary markers) of the context window around one
// target word, and the word id each position belongs to.
struct CharWindow {
  std::vector<std::size_t> chars;
  std::vector<std::size_t> words;       // word vocabulary ids
  std::vector<std::size_t> positions;   // token index in the sentence
  std::size_t left_marker = 0;          // index of the opening marker
  std::size_t right_marker = 0;         // index of the closing marker

  std::size_t size() const { return chars.size(); }
};

// `surfaces` are the sentence's normalized surface forms. Up to `width`
// characters are taken on each side of the target, counting a whitespace
// marker as one character; windows truncate at sentence edges.
CharWindow build_window(std::span<const std::string> surfaces, std::size_t target_index,
                        std::size_t width, const Vocab& vocab);

}  // namespace morphdis
