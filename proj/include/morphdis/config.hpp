#pragma once

#include <iosfwd>
#include <string>

#include "morphdis/model_config.hpp"

namespace morphdis {

// `key=value` lines; blank lines and lines starting with '#' are skipped.
// Later duplicates win.
KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues load_key_values(const std::string& path);

// Splits a `key=value` command-line override.
std::pair<std::string, std::string> split_assignment(const std::string& text);

}  // namespace morphdis
