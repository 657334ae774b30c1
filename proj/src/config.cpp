#include "morphdis/config.hpp"

#include <fstream>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw DataError(source, line_no, "expected key=value");
    const std::string key(trim(t.substr(0, eq)));
    if (key.empty()) throw DataError(source, line_no, "empty key");
    kv[key] = std::string(trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  return parse_key_values(in, path);
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("expected key=value, got '" + text + "'");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

}  // namespace morphdis
