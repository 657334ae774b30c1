#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace morphdis {

// Code-point folding table applied to input surfaces. The default folds
// Alif variants (madda, hamza above, hamza below, wasla) to bare Alif and
// Alif maqsura to Ya; tables can be loaded from a two-column file.
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(std::map<std::string, std::string> table);

  static Normalizer arabic_default();
  static Normalizer identity() { return Normalizer{}; }
  // Two tab-separated columns per line: source code point, replacement.
  static Normalizer load(const std::string& path);
  static Normalizer parse(std::istream& in, const std::string& source);

  std::string operator()(std::string_view text) const;
  const std::map<std::string, std::string>& table() const { return table_; }

  std::string serialize() const;
  static Normalizer deserialize(const std::string& text);

 private:
  std::map<std::string, std::string> table_;
};

inline std::string normalize_orthography(std::string_view text,
                                         const Normalizer& normalizer = Normalizer::arabic_default()) {
  return normalizer(text);
}

}  // namespace morphdis
