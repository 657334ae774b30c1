#include "morphdis/normalizer.hpp"

#include <fstream>
#include <sstream>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

Normalizer::Normalizer(std::map<std::string, std::string> table) : table_(std::move(table)) {
  // Resolve chains (a->b, b->c) so that folding is idempotent.
  for (auto& [from, to] : table_) {
    std::size_t hops = 0;
    std::string target = to;
    for (;;) {
      std::string next;
      bool changed = false;
      for (const auto& cp : split_codepoints(target)) {
        auto it = table_.find(cp);
        if (it != table_.end()) {
          next += it->second;
          changed = true;
        } else {
          next += cp;
        }
      }
      if (!changed) break;
      if (++hops > table_.size()) {
        throw DataError("normalization table has a cycle through '" + from + "'");
      }
      target = std::move(next);
    }
    to = std::move(target);
  }
}

Normalizer Normalizer::arabic_default() {
  const std::string alif = "ا";
  return Normalizer({{"آ", alif},   // Alif with madda
                     {"أ", alif},   // Alif with hamza above
                     {"إ", alif},   // Alif with hamza below
                     {"ٱ", alif},   // Alif wasla
                     {"ى", "ي"}});  // Alif maqsura -> Ya
}

Normalizer Normalizer::parse(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw DataError(source, lineno, "expected 2 tab-separated columns");
    if (split_codepoints(cols[0]).size() != 1) {
      throw DataError(source, lineno, "source column must be a single character");
    }
    table[cols[0]] = cols[1];
  }
  return Normalizer(std::move(table));
}

Normalizer Normalizer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open normalization table '" + path + "'");
  return parse(in, path);
}

std::string Normalizer::operator()(std::string_view text) const {
  if (table_.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : split_codepoints(text)) {
    auto it = table_.find(cp);
    out += it == table_.end() ? cp : it->second;
  }
  return out;
}

std::string Normalizer::serialize() const {
  std::ostringstream os;
  for (const auto& [from, to] : table_) os << from << '\t' << to << '\n';
  return os.str();
}

Normalizer Normalizer::deserialize(const std::string& text) {
  std::istringstream in(text);
  return parse(in, "<checkpoint>");
}

}  // namespace morphdis
