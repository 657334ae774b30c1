#include "morphdis/metrics.hpp"

#include <sstream>

#include "morphdis/error.hpp"
#include "morphdis/model_config.hpp"

namespace morphdis {

std::string MetricsReport::summary() const {
  std::ostringstream os;
  os << "tokens=" << tokens << " full=" << format_double(full) << " tags=" << format_double(tags)
     << " diac=" << format_double(diac) << " lex=" << format_double(lex)
     << " pos=" << format_double(pos);
  return os.str();
}

MetricsReport evaluate_analyses(std::span<const Analysis> gold, std::span<const Analysis> system) {
  if (gold.size() != system.size()) {
    throw DataError("evaluate: " + std::to_string(gold.size()) + " gold tokens vs " +
                    std::to_string(system.size()) + " system tokens");
  }
  MetricsReport r;
  r.tokens = gold.size();
  if (gold.empty()) return r;
  std::size_t pos = 0, tags = 0, lex = 0, diac = 0, full = 0;
  std::array<std::size_t, kNumTags> per{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool all_tags = true;
    for (std::size_t f = 0; f < kNumTags; ++f) {
      const bool ok = gold[i].tags[f] == system[i].tags[f];
      per[f] += ok;
      all_tags = all_tags && ok;
    }
    const bool lemma_ok = gold[i].lemma == system[i].lemma;
    const bool diac_ok = gold[i].diac == system[i].diac;
    pos += gold[i].tags[0] == system[i].tags[0];
    tags += all_tags;
    lex += lemma_ok;
    diac += diac_ok;
    full += all_tags && lemma_ok && diac_ok;
  }
  const double n = static_cast<double>(gold.size());
  r.pos = static_cast<double>(pos) / n;
  r.tags = static_cast<double>(tags) / n;
  r.lex = static_cast<double>(lex) / n;
  r.diac = static_cast<double>(diac) / n;
  r.full = static_cast<double>(full) / n;
  for (std::size_t f = 0; f < kNumTags; ++f) r.per_feature[f] = static_cast<double>(per[f]) / n;
  return r;
}

MetricsReport evaluate(const Corpus& gold, const Corpus& system, const Normalizer& normalizer) {
  std::vector<Analysis> g, s;
  const std::size_t n = std::min(gold.size(), system.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (gold[i].size() != system[i].size()) {
      throw DataError("evaluate: sentence " + std::to_string(i + 1) + " has " +
                      std::to_string(gold[i].size()) + " gold tokens but " +
                      std::to_string(system[i].size()) + " system tokens");
    }
    for (std::size_t j = 0; j < gold[i].size(); ++j) {
      if (normalizer(gold[i][j].surface) != normalizer(system[i][j].surface)) {
        throw DataError("evaluate: sentence " + std::to_string(i + 1) + " token " +
                        std::to_string(j + 1) + " differs: '" + gold[i][j].surface + "' vs '" +
                        system[i][j].surface + "'");
      }
      g.push_back(gold[i][j].gold);
      s.push_back(system[i][j].gold);
    }
  }
  if (gold.size() != system.size()) {
    throw DataError("evaluate: " + std::to_string(gold.size()) + " gold sentences vs " +
                    std::to_string(system.size()) + " system sentences (first divergence at sentence " +
                    std::to_string(n + 1) + ")");
  }
  return evaluate_analyses(g, s);
}

}  // namespace morphdis
