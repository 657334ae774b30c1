#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace morphdis {

// Splits UTF-8 text into code points, each kept as its byte sequence.
// Malformed bytes come out as one-byte units.
std::vector<std::string> split_codepoints(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace morphdis
