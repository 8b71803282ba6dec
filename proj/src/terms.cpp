#include "reqplumb/terms.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Auto: return "Auto";
    case Status::Accepted: return "Accepted";
    case Status::Rejected: return "Rejected";
  }
  return "Auto";
}

std::optional<Status> parse_status(std::string_view s) {
  if (s == "Auto") return Status::Auto;
  if (s == "Accepted") return Status::Accepted;
  if (s == "Rejected") return Status::Rejected;
  return std::nullopt;
}

std::string_view to_string(TermSource s) {
  switch (s) {
    case TermSource::Requirements70: return "requirements-70";
    case TermSource::DomainCorpus: return "domain-corpus";
    case TermSource::Holdout30: return "holdout-30";
  }
  return "requirements-70";
}

std::optional<TermSource> parse_term_source(std::string_view s) {
  for (auto src : {TermSource::Requirements70, TermSource::DomainCorpus, TermSource::Holdout30})
    if (to_string(src) == s) return src;
  return std::nullopt;
}

StopWords parse_stopwords(std::string_view content) {
  StopWords out;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    line = trim(line);
    if (!line.empty() && line.front() != '#') {
      auto w = normalize_word(line);
      if (!w.empty()) out.insert(std::move(w));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

StopWords load_stopwords(const std::filesystem::path& path) { return parse_stopwords(read_file(path)); }

std::string TermCandidate::text() const { return join(words, " "); }
std::string TermCandidate::id() const { return term_id(text()); }

std::string term_id(std::string_view text) { return slug(text); }

std::vector<std::string> TermSet::labels() const {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (auto& t : terms) out.push_back(t.text());
  return out;
}

bool TermSet::contains(std::string_view text) const {
  return std::any_of(terms.begin(), terms.end(), [&](auto& t) { return t.text() == text; });
}

namespace {

bool matches_filter(const std::vector<Token>& toks, std::size_t begin, std::size_t end) {
  std::size_t k = begin;
  while (k < end && toks[k].pos == Pos::Adj) ++k;
  if (k == end) return false;
  for (; k < end; ++k)
    if (toks[k].pos != Pos::Noun) return false;
  return true;
}

}  // namespace

std::vector<TermCandidate> extract_candidates(const RequirementSet& reqs, const StopWords& stopwords,
                                              std::size_t max_words) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (auto& req : reqs.requirements) {
    auto& toks = req.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      for (std::size_t len = 1; len <= max_words && i + len <= toks.size(); ++len) {
        if (stopwords.count(toks[i + len - 1].norm)) break;
        if (!matches_filter(toks, i, i + len)) continue;
        std::vector<std::string> words;
        for (std::size_t k = i; k < i + len; ++k) words.push_back(toks[k].norm);
        ++counts[words];
      }
    }
  }

  std::vector<TermCandidate> out;
  out.reserve(counts.size());
  std::map<std::vector<std::string>, std::size_t> index;
  for (auto& [words, f] : counts) {
    index[words] = out.size();
    out.push_back({words, f, {}, 0.0, Status::Auto});
  }
  // Each longer candidate registers itself with every shorter candidate it contains.
  for (auto& b : out) {
    auto n = b.words.size();
    std::set<std::size_t> inner;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t len = 1; i + len <= n && len < n; ++len) {
        std::vector<std::string> sub(b.words.begin() + i, b.words.begin() + i + len);
        if (auto it = index.find(sub); it != index.end()) inner.insert(it->second);
      }
    for (auto a : inner) out[a].nested_in.push_back(b.text());
  }
  for (auto& c : out) std::sort(c.nested_in.begin(), c.nested_in.end());
  return out;
}

double cvalue_of(std::size_t length, std::size_t frequency, const std::vector<std::size_t>& nesting_frequencies) {
  double factor = length == 1 ? 1.0 : std::log2(static_cast<double>(length));
  double f = static_cast<double>(frequency);
  if (nesting_frequencies.empty()) return factor * f;
  double sum = 0.0;
  for (auto fb : nesting_frequencies) sum += static_cast<double>(fb);
  return factor * (f - sum / static_cast<double>(nesting_frequencies.size()));
}

std::vector<TermCandidate> cvalue_rank(std::vector<TermCandidate> candidates) {
  std::map<std::string, std::size_t> freq;
  for (auto& c : candidates) freq[c.text()] = c.frequency;
  for (auto& c : candidates) {
    std::vector<std::size_t> fs;
    for (auto& b : c.nested_in) {
      auto it = freq.find(b);
      if (it != freq.end()) fs.push_back(it->second);
    }
    c.cvalue = cvalue_of(c.words.size(), c.frequency, fs);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const TermCandidate& a, const TermCandidate& b) {
    if (a.cvalue != b.cvalue) return a.cvalue > b.cvalue;
    return a.words < b.words;
  });
  return candidates;
}

TermSet select_terms(const std::vector<TermCandidate>& ranked, double threshold, const Decisions* curation,
                     TermSource source) {
  if (threshold < 0 || std::isnan(threshold)) throw Error(fmt::format("term threshold must be >= 0, got {}", threshold));
  TermSet set;
  set.source = source;
  set.threshold = threshold;
  set.candidate_count = ranked.size();
  std::set<std::string> known_ids;
  for (auto& c : ranked) {
    auto id = c.id();
    known_ids.insert(id);
    bool above = c.cvalue >= threshold;
    set.auto_count += above;
    std::optional<Status> decision;
    if (curation)
      if (auto it = curation->find(id); it != curation->end() && it->second != Status::Auto) decision = it->second;
    if (!above && decision != Status::Accepted) continue;
    TermCandidate t = c;
    t.status = decision.value_or(Status::Auto);
    if (t.status == Status::Rejected) set.rejected.push_back(std::move(t));
    else set.terms.push_back(std::move(t));
  }
  if (curation)
    for (auto& [id, st] : *curation)
      if (!known_ids.count(id))
        set.warnings.push_back(fmt::format("curation decision for unknown term '{}' ignored", id));
  if (set.auto_count == 0)
    set.warnings.push_back(fmt::format("no candidate reaches the threshold {}", threshold));
  return set;
}

std::vector<std::string> noun_phrases(const RequirementSet& reqs, const StopWords& stopwords) {
  std::set<std::string> out;
  for (auto& req : reqs.requirements) {
    auto& toks = req.tokens;
    std::size_t i = 0;
    while (i < toks.size()) {
      std::size_t j = i;
      while (j < toks.size() && !stopwords.count(toks[j].norm) &&
             (toks[j].pos == Pos::Adj || toks[j].pos == Pos::Noun))
        ++j;
      // Trim to ADJ* NOUN+ by dropping trailing adjectives and splitting at
      // adjectives that follow nouns.
      std::size_t s = i;
      while (s < j) {
        std::size_t k = s;
        while (k < j && toks[k].pos == Pos::Adj) ++k;
        std::size_t e = k;
        while (e < j && toks[e].pos == Pos::Noun) ++e;
        if (e > k) {
          std::vector<std::string> words;
          for (std::size_t m = s; m < e; ++m) words.push_back(toks[m].norm);
          out.insert(join(words, " "));
        }
        s = e == s ? s + 1 : e;
      }
      i = j == i ? i + 1 : j;
    }
  }
  return {out.begin(), out.end()};
}

nlohmann::json to_json(const TermCandidate& c) {
  return {{"id", c.id()},
          {"text", c.text()},
          {"words", c.words},
          {"frequency", c.frequency},
          {"nested_in", c.nested_in},
          {"cvalue", c.cvalue},
          {"status", to_string(c.status)}};
}

TermCandidate candidate_from_json(const nlohmann::json& j) {
  TermCandidate c;
  c.words = j.at("words").get<std::vector<std::string>>();
  c.frequency = j.at("frequency").get<std::size_t>();
  c.nested_in = j.value("nested_in", std::vector<std::string>{});
  c.cvalue = j.at("cvalue").get<double>();
  auto st = parse_status(j.value("status", "Auto"));
  if (!st) throw Error("unknown term status " + j.at("status").dump());
  c.status = *st;
  return c;
}

nlohmann::json to_json(const TermSet& set) {
  nlohmann::json terms = nlohmann::json::array(), rejected = nlohmann::json::array();
  for (auto& t : set.terms) terms.push_back(to_json(t));
  for (auto& t : set.rejected) rejected.push_back(to_json(t));
  return {{"schema", kSchemaVersion},
          {"source", to_string(set.source)},
          {"threshold", set.threshold},
          {"counts", {{"candidates", set.candidate_count}, {"auto", set.auto_count}, {"selected", set.terms.size()}}},
          {"warnings", set.warnings},
          {"terms", terms},
          {"rejected", rejected}};
}

TermSet termset_from_json(const nlohmann::json& j) {
  TermSet set;
  auto src = parse_term_source(j.at("source").get<std::string>());
  if (!src) throw Error("unknown term source " + j.at("source").dump());
  set.source = *src;
  set.threshold = j.at("threshold").get<double>();
  set.candidate_count = j.at("counts").at("candidates").get<std::size_t>();
  set.auto_count = j.at("counts").at("auto").get<std::size_t>();
  for (auto& t : j.at("terms")) set.terms.push_back(candidate_from_json(t));
  for (auto& t : j.value("rejected", nlohmann::json::array())) set.rejected.push_back(candidate_from_json(t));
  set.warnings = j.value("warnings", std::vector<std::string>{});
  return set;
}

nlohmann::json to_json(const Decisions& d) {
  nlohmann::json dec = nlohmann::json::object();
  for (auto& [id, st] : d) dec[id] = to_string(st);
  return {{"schema", kSchemaVersion}, {"decisions", dec}};
}

Decisions decisions_from_json(const nlohmann::json& j) {
  Decisions d;
  if (!j.contains("decisions")) return d;
  for (auto& [id, v] : j.at("decisions").items()) {
    auto st = parse_status(v.get<std::string>());
    if (!st || *st == Status::Auto) throw Error(fmt::format("decision for '{}' must be Accepted or Rejected", id));
    d[id] = *st;
  }
  return d;
}

}  // namespace reqplumb
