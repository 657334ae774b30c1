#include "morphdis/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

namespace {

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string f;
  while (is >> f) out.push_back(f);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

bool is_count(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

}  // namespace

std::size_t load_embeddings(const std::string& path, const Vocab& vocab, std::size_t dim,
                            Parameter& table) {
  if (table.value.rank() != 2 || table.value.cols() != dim || table.value.rows() != vocab.words.size()) {
    throw UsageError("embedding table shape " + table.value.shape_string() +
                     " does not match vocabulary of " + std::to_string(vocab.words.size()) +
                     " words x " + std::to_string(dim));
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file '" + path + "'");
  std::string line;
  std::size_t lineno = 0, replaced = 0;
  std::vector<bool> seen(vocab.words.size(), false);
  while (std::getline(in, line)) {
    ++lineno;
    const auto cols = fields(line);
    if (cols.empty()) continue;
    if (lineno == 1 && cols.size() == 2 && is_count(cols[0]) && is_count(cols[1])) {
      if (std::stoul(cols[1]) != dim) {
        throw DataError(path, lineno, "header dimension " + cols[1] + " does not match d_w=" +
                                          std::to_string(dim));
      }
      continue;
    }
    if (cols.size() != dim + 1) {
      throw DataError(path, lineno, "expected " + std::to_string(dim) + " values, found " +
                                        std::to_string(cols.size() - 1));
    }
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(cols[i + 1], row[i])) {
        throw DataError(path, lineno, "malformed number '" + cols[i + 1] + "'");
      }
    }
    const auto id = vocab.words.find(cols[0]);
    if (!id || *id == kWordPad || *id == kWordUnk) continue;
    for (std::size_t i = 0; i < dim; ++i) table.value.at(*id, i) = row[i];
    if (!seen[*id]) {
      seen[*id] = true;
      ++replaced;
    }
  }
  return replaced;
}

}  // namespace morphdis
