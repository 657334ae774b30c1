#pragma once

#include <cstddef>
#include <string>

#include "morphdis/parameter.hpp"
#include "morphdis/vocab.hpp"

namespace morphdis {

// Loads pretrained word vectors ("word f1 ... fd" per line, optional
// "count dim" header) into the rows of `table` whose words appear in the
// file. Rows for absent words keep their initialization. Returns the
// number of rows replaced.
std::size_t load_embeddings(const std::string& path, const Vocab& vocab, std::size_t dim,
                            Parameter& table);

}  // namespace morphdis
