#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "reqplumb/requirements.hpp"

namespace reqplumb {

// Review state shared by terms and synonym pairs.
enum class Status { Auto, Accepted, Rejected };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);

// Curation decisions keyed by item id.
using Decisions = std::map<std::string, Status>;

using StopWords = std::unordered_set<std::string>;

StopWords parse_stopwords(std::string_view content);
StopWords load_stopwords(const std::filesystem::path& path);

struct TermCandidate {
  std::vector<std::string> words;
  std::size_t frequency = 0;
  std::vector<std::string> nested_in;  // texts of longer candidates containing this one
  double cvalue = 0.0;
  Status status = Status::Auto;

  std::string text() const;
  std::string id() const;
};

// Stable id of a term text, e.g. "object avoidance system" -> "object_avoidance_system".
std::string term_id(std::string_view text);

enum class TermSource { Requirements70, DomainCorpus, Holdout30 };

std::string_view to_string(TermSource s);
std::optional<TermSource> parse_term_source(std::string_view s);

struct TermSet {
  TermSource source = TermSource::Requirements70;
  double threshold = 1.0;
  std::size_t candidate_count = 0;  // every candidate before thresholding
  std::size_t auto_count = 0;       // candidates at or above the threshold
  std::vector<TermCandidate> terms;     // Auto or Accepted, in rank order
  std::vector<TermCandidate> rejected;  // curated out
  std::vector<std::string> warnings;

  std::vector<std::string> labels() const;
  bool contains(std::string_view text) const;
};

constexpr std::size_t kMaxTermWords = 6;

// Every contiguous window of 1..max_words tokens matching ADJ* NOUN+ and free
// of stop-words, with occurrence counts and nesting. Sorted by text.
std::vector<TermCandidate> extract_candidates(const RequirementSet& reqs, const StopWords& stopwords,
                                              std::size_t max_words = kMaxTermWords);

// C-Value termhood; single-word terms use (1 + log2 |a|) as the length factor.
double cvalue_of(std::size_t length, std::size_t frequency, const std::vector<std::size_t>& nesting_frequencies);

// Scores candidates and sorts them by (cvalue desc, words asc).
std::vector<TermCandidate> cvalue_rank(std::vector<TermCandidate> candidates);

// Keeps candidates with cvalue >= threshold, then applies curation: rejected
// ids are removed, accepted ids below the threshold are added back.
TermSet select_terms(const std::vector<TermCandidate>& ranked, double threshold,
                     const Decisions* curation = nullptr, TermSource source = TermSource::Requirements70);

// Maximal ADJ* NOUN+ runs, used as the naive noun-phrase baseline.
std::vector<std::string> noun_phrases(const RequirementSet& reqs, const StopWords& stopwords);

nlohmann::json to_json(const TermCandidate& c);
TermCandidate candidate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TermSet& set);
TermSet termset_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Decisions& d);
Decisions decisions_from_json(const nlohmann::json& j);

}  // namespace reqplumb
