#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphdis {

// The 14 closed-class (non-lexicalized) features, in corpus column order.
inline constexpr std::size_t kNumTags = 14;
inline constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "pos", "prc3", "prc2", "prc1", "prc0", "per", "asp",
    "vox", "mod",  "gen",  "num",  "stt",  "cas", "enc0"};

// Full analysis = 14 tags + lemma + diac. Indices 0..13 are the tags.
inline constexpr std::size_t kNumFeatures = kNumTags + 2;
inline constexpr std::size_t kLemmaFeature = kNumTags;
inline constexpr std::size_t kDiacFeature = kNumTags + 1;

std::string_view feature_name(std::size_t feature);
std::optional<std::size_t> tag_index(std::string_view name);
// Index in the 16-feature space (tags, "lemma", "diac").
std::optional<std::size_t> feature_index(std::string_view name);

struct Analysis {
  std::string diac;
  std::string lemma;
  std::array<std::string, kNumTags> tags;

  const std::string& tag(std::string_view name) const;
  // Value of any of the 16 features.
  const std::string& feature(std::size_t index) const;
  std::string& feature(std::size_t index);

  friend bool operator==(const Analysis&, const Analysis&) = default;
};

struct AnnotatedToken {
  std::string surface;
  Analysis gold;

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

using Sentence = std::vector<AnnotatedToken>;
using Corpus = std::vector<Sentence>;

}  // namespace morphdis
