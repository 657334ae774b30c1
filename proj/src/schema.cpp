#include "morphdis/schema.hpp"

#include "morphdis/error.hpp"

namespace morphdis {

std::string_view feature_name(std::size_t feature) {
  if (feature < kNumTags) return kTagNames[feature];
  if (feature == kLemmaFeature) return "lemma";
  if (feature == kDiacFeature) return "diac";
  throw UsageError("feature index out of range: " + std::to_string(feature));
}

std::optional<std::size_t> tag_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumTags; ++i) {
    if (kTagNames[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> feature_index(std::string_view name) {
  if (name == "lemma") return kLemmaFeature;
  if (name == "diac") return kDiacFeature;
  return tag_index(name);
}

const std::string& Analysis::tag(std::string_view name) const {
  const auto idx = tag_index(name);
  if (!idx) throw UsageError("unknown feature '" + std::string(name) + "'");
  return tags[*idx];
}

const std::string& Analysis::feature(std::size_t index) const {
  if (index < kNumTags) return tags[index];
  if (index == kLemmaFeature) return lemma;
  if (index == kDiacFeature) return diac;
  throw UsageError("feature index out of range: " + std::to_string(index));
}

std::string& Analysis::feature(std::size_t index) {
  return const_cast<std::string&>(std::as_const(*this).feature(index));
}

}  // namespace morphdis
