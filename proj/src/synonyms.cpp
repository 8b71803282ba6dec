#include "reqplumb/synonyms.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

Mwt decompose_mwt(const std::vector<std::string>& words) {
  if (words.empty()) throw Error("cannot decompose an empty term");
  Mwt m;
  m.full = words;
  m.E = words.front();
  if (words.size() > 1) {
    m.T = words.back();
    m.M.assign(words.begin() + 1, words.end() - 1);
  }
  return m;
}

SynonymLexicon SynonymLexicon::parse(std::string_view content, std::string_view origin) {
  SynonymLexicon lex;
  std::size_t line_no = 0, pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    line = trim(line);
    if (!line.empty() && line.front() != '#') {
      auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw Error(fmt::format("{}:{}: expected 'word<TAB>word'", origin, line_no));
      auto a = normalize_word(trim(line.substr(0, tab)));
      auto b = normalize_word(trim(line.substr(tab + 1)));
      if (a.empty() || b.empty()) throw Error(fmt::format("{}:{}: empty synonym", origin, line_no));
      lex.add(a, b);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void SynonymLexicon::add(std::string_view a, std::string_view b) {
  if (a == b) return;
  pairs_.emplace(std::string(std::min(a, b)), std::string(std::max(a, b)));
}

bool SynonymLexicon::syn(std::string_view a, std::string_view b) const {
  if (a.empty() || b.empty() || a == b) return false;
  return pairs_.count({std::string(std::min(a, b)), std::string(std::max(a, b))}) != 0;
}

std::string_view to_string(SynRule r) {
  switch (r) {
    case SynRule::R1: return "R1";
    case SynRule::R2: return "R2";
    case SynRule::R3: return "R3";
    case SynRule::R4: return "R4";
    case SynRule::Lexicon: return "Lexicon";
    case SynRule::EmbeddingOnly: return "EmbeddingOnly";
  }
  return "EmbeddingOnly";
}

std::optional<SynRule> parse_syn_rule(std::string_view s) {
  for (auto r : {SynRule::R1, SynRule::R2, SynRule::R3, SynRule::R4, SynRule::Lexicon, SynRule::EmbeddingOnly})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

std::optional<SynRule> apply_rules(const Mwt& a, const Mwt& b, const SynonymLexicon& lexicon) {
  if (a.full == b.full) return std::nullopt;
  if (a.full.size() == 1 && b.full.size() == 1)
    return lexicon.syn(a.E, b.E) ? std::optional(SynRule::Lexicon) : std::nullopt;
  if (a.M != b.M) return std::nullopt;
  if (!a.T.empty() && a.T == b.T && lexicon.syn(a.E, b.E)) return SynRule::R1;
  if (!a.E.empty() && a.E == b.E && lexicon.syn(a.T, b.T)) return SynRule::R2;
  if (!a.E.empty() && a.E == b.T && lexicon.syn(a.T, b.E)) return SynRule::R3;
  if (!b.E.empty() && b.E == a.T && lexicon.syn(b.T, a.E)) return SynRule::R4;
  return std::nullopt;
}

std::string synonym_pair_id(std::string_view a, std::string_view b) {
  return fmt::format("{}|{}", std::min(a, b), std::max(a, b));
}

std::string SynonymPair::id() const { return synonym_pair_id(a, b); }

std::vector<SynonymPair> detect_synonyms(const std::vector<std::string>& rt, const std::vector<std::string>& ct,
                                         const WordEmbeddings& embeddings, const SynonymLexicon& lexicon,
                                         const SynonymOptions& opts, std::vector<std::string>* warnings) {
  auto vectors_for = [&](const std::vector<std::string>& labels, std::string_view side) {
    std::vector<std::pair<std::string, std::vector<double>>> out;
    std::set<std::string> seen;
    for (auto& l : labels) {
      if (!seen.insert(l).second) continue;
      auto v = embeddings.term_vector(split_ws(l));
      if (!v) {
        if (warnings) warnings->push_back(fmt::format("{} '{}' has no word in the embedding vocabulary", side, l));
        continue;
      }
      out.emplace_back(l, std::move(*v));
    }
    return out;
  };
  auto rv = vectors_for(rt, "term");
  auto cv = vectors_for(ct, "entity label");

  std::vector<SynonymPair> pairs;
  std::set<std::string> ids;
  for (auto& [a, va] : rv) {
    auto ma = decompose_mwt(split_ws(a));
    for (auto& [b, vb] : cv) {
      if (a == b) continue;
      double sim = cosine(va, vb);
      if (sim < opts.sim_threshold) continue;
      if (!ids.insert(synonym_pair_id(a, b)).second) continue;
      auto rule = apply_rules(ma, decompose_mwt(split_ws(b)), lexicon);
      pairs.push_back({a, b, rule.value_or(SynRule::EmbeddingOnly), sim, Status::Auto});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const SynonymPair& x, const SynonymPair& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    return x.id() < y.id();
  });
  return pairs;
}

void apply_decisions(std::vector<SynonymPair>& pairs, const Decisions& decisions) {
  for (auto& p : pairs) {
    auto it = decisions.find(p.id());
    p.status = it == decisions.end() ? Status::Auto : it->second;
  }
}

std::vector<SynonymPair> accepted_synonyms(const std::vector<SynonymPair>& pairs) {
  std::vector<SynonymPair> out;
  for (auto& p : pairs)
    if (p.status == Status::Accepted || (p.status == Status::Auto && p.rule != SynRule::EmbeddingOnly))
      out.push_back(p);
  return out;
}

nlohmann::json to_json(const SynonymPair& p) {
  return {{"id", p.id()},
          {"a", p.a},
          {"b", p.b},
          {"rule", to_string(p.rule)},
          {"similarity", p.similarity},
          {"status", to_string(p.status)}};
}

SynonymPair synonym_pair_from_json(const nlohmann::json& j) {
  SynonymPair p;
  p.a = j.at("a").get<std::string>();
  p.b = j.at("b").get<std::string>();
  auto rule = parse_syn_rule(j.at("rule").get<std::string>());
  auto st = parse_status(j.value("status", "Auto"));
  if (!rule || !st) throw Error("malformed synonym pair " + j.dump());
  p.rule = *rule;
  p.status = *st;
  p.similarity = j.at("similarity").get<double>();
  return p;
}

nlohmann::json synonyms_to_json(const std::vector<SynonymPair>& pairs, double threshold,
                                const std::vector<std::string>& warnings) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t accepted = 0, rule_based = 0;
  for (auto& p : pairs) {
    arr.push_back(to_json(p));
    rule_based += p.rule != SynRule::EmbeddingOnly;
  }
  accepted = accepted_synonyms(pairs).size();
  return {{"schema", kSchemaVersion},
          {"sim_threshold", threshold},
          {"counts", {{"auto", pairs.size()}, {"rule_based", rule_based}, {"accepted", accepted}}},
          {"warnings", warnings},
          {"pairs", arr}};
}

std::vector<SynonymPair> synonyms_from_json(const nlohmann::json& j) {
  std::vector<SynonymPair> out;
  for (auto& p : j.at("pairs")) out.push_back(synonym_pair_from_json(p));
  return out;
}

}  // namespace reqplumb
