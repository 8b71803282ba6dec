#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reqplumb/terms.hpp"
#include "reqplumb/word_embeddings.hpp"

namespace reqplumb {

// Multi-word term split into head E, middle M and tail T.
struct Mwt {
  std::string E;
  std::vector<std::string> M;
  std::string T;
  std::vector<std::string> full;
};

Mwt decompose_mwt(const std::vector<std::string>& words);

// Flat single-word synonym relation; symmetric and irreflexive.
class SynonymLexicon {
 public:
  static SynonymLexicon parse(std::string_view content, std::string_view origin = "<memory>");
  static SynonymLexicon load(const std::filesystem::path& path);

  void add(std::string_view a, std::string_view b);
  bool syn(std::string_view a, std::string_view b) const;
  std::size_t size() const { return pairs_.size(); }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

enum class SynRule { R1, R2, R3, R4, Lexicon, EmbeddingOnly };

std::string_view to_string(SynRule r);
std::optional<SynRule> parse_syn_rule(std::string_view s);

// First matching rule among R1..R4; Lexicon for two single words that are
// lexicon synonyms.
std::optional<SynRule> apply_rules(const Mwt& a, const Mwt& b, const SynonymLexicon& lexicon);

struct SynonymPair {
  std::string a;  // requirement term
  std::string b;  // entity label
  SynRule rule = SynRule::EmbeddingOnly;
  double similarity = 0.0;
  Status status = Status::Auto;

  // Canonical "x|y" with x < y, independent of argument order.
  std::string id() const;
};

std::string synonym_pair_id(std::string_view a, std::string_view b);

struct SynonymOptions {
  double sim_threshold = 0.6;
};

// Candidate pairs are (rt, ct) with cosine of mean word vectors at or above the
// threshold; identical strings are skipped. Sorted by similarity desc.
std::vector<SynonymPair> detect_synonyms(const std::vector<std::string>& rt, const std::vector<std::string>& ct,
                                         const WordEmbeddings& embeddings, const SynonymLexicon& lexicon,
                                         const SynonymOptions& opts, std::vector<std::string>* warnings = nullptr);

void apply_decisions(std::vector<SynonymPair>& pairs, const Decisions& decisions);

// Pairs that feed mapping: curated Accepted, plus uncurated rule matches.
std::vector<SynonymPair> accepted_synonyms(const std::vector<SynonymPair>& pairs);

nlohmann::json to_json(const SynonymPair& p);
SynonymPair synonym_pair_from_json(const nlohmann::json& j);
nlohmann::json synonyms_to_json(const std::vector<SynonymPair>& pairs, double threshold,
                                const std::vector<std::string>& warnings);
std::vector<SynonymPair> synonyms_from_json(const nlohmann::json& j);

}  // namespace reqplumb
