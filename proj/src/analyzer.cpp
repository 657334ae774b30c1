#include "morphdis/analyzer.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "morphdis/corpus.hpp"
#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

void MorphDictionary::add(const std::string& normalized_surface, Analysis analysis) {
  entries_[normalized_surface].push_back(std::move(analysis));
  ++analysis_count_;
}

const std::vector<Analysis>* MorphDictionary::lookup(std::string_view normalized_surface) const {
  auto it = entries_.find(normalized_surface);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Analysis> MorphDictionary::all_analyses() const {
  std::vector<Analysis> out;
  for (const auto& [surface, list] : entries_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

MorphDictionary parse_dictionary(std::istream& in, const std::string& source,
                                 const Normalizer& normalizer) {
  MorphDictionary dict(source);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != kCorpusColumns) {
      throw DataError(source, lineno, "incomplete analysis: expected " +
                                          std::to_string(kCorpusColumns) + " columns, found " +
                                          std::to_string(cols.size()));
    }
    if (cols[0].empty()) throw DataError(source, lineno, "empty surface form");
    Analysis a = parse_analysis_columns(cols, 1);
    for (std::size_t f = 0; f < kNumTags; ++f) {
      if (a.tags[f].empty()) {
        throw DataError(source, lineno, "empty value for feature '" + std::string(kTagNames[f]) + "'");
      }
    }
    dict.add(normalizer(cols[0]), std::move(a));
  }
  return dict;
}

MorphDictionary load_dictionary(const std::string& path, const Normalizer& normalizer) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file '" + path + "'");
  return parse_dictionary(in, path, normalizer);
}

CandidateTagSets candidates(const MorphDictionary& dict, std::string_view normalized_surface,
                            const Vocab& vocab, OovPolicy policy) {
  CandidateTagSets out;
  const auto* analyses = dict.lookup(normalized_surface);
  if (analyses == nullptr || analyses->empty()) {
    out.oov = true;
    if (policy == OovPolicy::all_values) {
      for (std::size_t f = 0; f < kNumTags; ++f) {
        out.values[f] = vocab.tags[f].items();
        std::sort(out.values[f].begin(), out.values[f].end());
      }
    }
    return out;
  }
  for (std::size_t f = 0; f < kNumTags; ++f) {
    std::set<std::string> values;
    for (const auto& a : *analyses) values.insert(a.tags[f]);
    out.values[f].assign(values.begin(), values.end());
  }
  return out;
}

std::string ConsistencyRule::describe() const {
  std::string s = "if " + std::string(kTagNames[condition_feature]) + "=" + condition_value +
                  " then " + std::string(kTagNames[required_feature]) + " in {";
  for (std::size_t i = 0; i < allowed.size(); ++i) s += (i ? "," : "") + allowed[i];
  return s + "}";
}

std::vector<ConsistencyRule> parse_rules(std::istream& in, const std::string& source) {
  static const std::regex pattern(
      R"(^\s*if\s+([A-Za-z0-9_]+)\s*=\s*(\S+)\s+then\s+([A-Za-z0-9_]+)\s+in\s*\{([^}]*)\}\s*$)");
  std::vector<ConsistencyRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::smatch m;
    const std::string text(t);
    if (!std::regex_match(text, m, pattern)) {
      throw DataError(source, lineno, "malformed rule (expected 'if f=v then g in {a,b}')");
    }
    ConsistencyRule r;
    const auto cond = tag_index(m[1].str());
    const auto req = tag_index(m[3].str());
    if (!cond) throw DataError(source, lineno, "unknown feature '" + m[1].str() + "'");
    if (!req) throw DataError(source, lineno, "unknown feature '" + m[3].str() + "'");
    r.condition_feature = *cond;
    r.condition_value = m[2].str();
    r.required_feature = *req;
    for (const auto& v : split(m[4].str(), ',')) {
      const auto tv = trim(v);
      if (!tv.empty()) r.allowed.emplace_back(tv);
    }
    if (r.allowed.empty()) throw DataError(source, lineno, "rule allows no values");
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<ConsistencyRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rules file '" + path + "'");
  return parse_rules(in, path);
}

std::vector<ConsistencyRule> default_rules() {
  std::istringstream in(
      "if pos=verb then cas in {na}\n"
      "if pos=verb then stt in {na}\n"
      "if pos=noun then asp in {na}\n"
      "if pos=noun then per in {na}\n"
      "if pos=noun then mod in {na}\n"
      "if pos=noun then vox in {na}\n");
  return parse_rules(in, "<default rules>");
}

std::vector<Violation> check_consistency(const Analysis& analysis,
                                         const std::vector<ConsistencyRule>& rules) {
  std::vector<Violation> out;
  for (const auto& r : rules) {
    if (analysis.tags[r.condition_feature] != r.condition_value) continue;
    const auto& v = analysis.tags[r.required_feature];
    if (std::find(r.allowed.begin(), r.allowed.end(), v) == r.allowed.end()) {
      out.push_back({r.describe(), std::string(kTagNames[r.required_feature]), v});
    }
  }
  return out;
}

}  // namespace morphdis
