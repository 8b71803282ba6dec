#include "reqplumb/requirements.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

namespace {

constexpr std::array<std::pair<Pos, std::string_view>, 7> kPosNames{{
    {Pos::Noun, "NOUN"},
    {Pos::Verb, "VERB"},
    {Pos::Adj, "ADJ"},
    {Pos::Det, "DET"},
    {Pos::Prep, "PREP"},
    {Pos::Conj, "CONJ"},
    {Pos::Other, "OTHER"},
}};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_separator(char c) {
  switch (c) {
    case ',': case '.': case ';': case ':': case '!': case '?': case '(': case ')':
    case '[': case ']': case '{': case '}': case '"': case '/': case '\\': case '|':
      return true;
    default:
      return std::isspace(static_cast<unsigned char>(c)) != 0;
  }
}

// "<n>. text" or "<n>) text"; returns the number and the remaining text.
std::optional<std::pair<long, std::string_view>> numbered_prefix(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  if (i + 1 < line.size() && !std::isspace(static_cast<unsigned char>(line[i + 1])))
    return std::nullopt;
  long n = 0;
  std::from_chars(line.data(), line.data() + i, n);
  return std::make_pair(n, trim(line.substr(i + 1)));
}

}  // namespace

std::string_view to_string(Pos pos) {
  for (auto& [p, name] : kPosNames)
    if (p == pos) return name;
  return "OTHER";
}

std::optional<Pos> parse_pos(std::string_view tag) {
  for (auto& [p, name] : kPosNames)
    if (name == tag) return p;
  return std::nullopt;
}

std::optional<RequirementFormat> parse_requirement_format(std::string_view s) {
  if (s == "auto") return RequirementFormat::Auto;
  if (s == "one-per-line") return RequirementFormat::OnePerLine;
  if (s == "numbered-list") return RequirementFormat::NumberedList;
  return std::nullopt;
}

PosLexicon PosLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

PosLexicon PosLexicon::parse(std::string_view content, std::string_view origin) {
  PosLexicon lex;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = trim(content.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(fmt::format("{}:{}: expected word<TAB>TAG", origin, line_no));
    auto tag = parse_pos(trim(line.substr(tab + 1)));
    if (!tag)
      throw Error(fmt::format("{}:{}: unknown tag '{}'", origin, line_no,
                              trim(line.substr(tab + 1))));
    lex.add(normalize_word(line.substr(0, tab)), *tag);
  }
  return lex;
}

void PosLexicon::add(std::string word, Pos pos) { entries_[std::move(word)] = pos; }

std::optional<Pos> PosLexicon::lookup(std::string_view norm) const {
  auto it = entries_.find(std::string(norm));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Pos PosLexicon::tag(std::string_view norm) const {
  if (auto hit = lookup(norm)) return *hit;
  if (std::any_of(norm.begin(), norm.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return Pos::Other;
  for (std::string_view s : {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism"})
    if (ends_with(norm, s)) return Pos::Noun;
  if (ends_with(norm, "ly")) return Pos::Other;
  for (std::string_view s : {"able", "ible", "ous", "ive", "ful", "less", "ical", "ional"})
    if (ends_with(norm, s)) return Pos::Adj;
  for (std::string_view s : {"ize", "ise", "ify"})
    if (ends_with(norm, s)) return Pos::Verb;
  if (norm.size() > 4 && ends_with(norm, "ed")) return Pos::Verb;
  return Pos::Noun;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_separator(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_separator(text[j])) ++j;
    if (j > i) {
      std::string surface(text.substr(i, j - i));
      std::string norm = normalize_word(surface);
      if (!norm.empty()) tokens.push_back(Token{std::move(surface), std::move(norm), Pos::Noun});
    }
    i = j;
  }
  return tokens;
}

Requirement tokenize_and_tag(Requirement req, const PosLexicon& lexicon) {
  req.tokens = tokenize(req.text);
  for (auto& tok : req.tokens) tok.pos = lexicon.tag(tok.norm);
  return req;
}

RequirementSet annotate(RequirementSet set, const PosLexicon& lexicon) {
  for (auto& req : set.requirements) req = tokenize_and_tag(std::move(req), lexicon);
  return set;
}

RequirementSet parse_requirements(std::string_view content, std::string name,
                                  RequirementFormat format, std::string provenance) {
  if (!is_valid_utf8(content))
    throw Error(fmt::format("{}: not valid UTF-8", provenance.empty() ? name : provenance));

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= content.size();) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }

  if (format == RequirementFormat::Auto) {
    format = RequirementFormat::OnePerLine;
    for (auto line : lines) {
      if (trim(line).empty()) continue;
      if (numbered_prefix(trim(line))) format = RequirementFormat::NumberedList;
      break;
    }
  }

  RequirementSet set;
  set.name = std::move(name);
  set.provenance = std::move(provenance);
  std::vector<std::string> texts;

  if (format == RequirementFormat::OnePerLine) {
    for (auto line : lines)
      if (auto t = trim(line); !t.empty()) texts.emplace_back(t);
  } else {
    long expected = 0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      auto t = trim(lines[k]);
      if (t.empty()) continue;
      if (auto num = numbered_prefix(t)) {
        if (expected != 0 && num->first != expected)
          throw Error(fmt::format("{}:{}: expected item {} but found {}", set.name, k + 1,
                                  expected, num->first));
        expected = num->first + 1;
        texts.emplace_back(num->second);
      } else if (texts.empty()) {
        throw Error(fmt::format("{}:{}: malformed numbering, line does not start with '<n>.'",
                                set.name, k + 1));
      } else {
        // Continuation of a multi-line statement.
        texts.back() += ' ';
        texts.back() += t;
      }
    }
  }

  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) continue;
    set.requirements.push_back(
        Requirement{fmt::format("{}-{}", set.name, set.requirements.size() + 1), texts[i], {}});
  }
  if (set.requirements.empty()) throw Error("no requirements found");
  return set;
}

RequirementSet load_requirements(const std::filesystem::path& path, RequirementFormat format) {
  return parse_requirements(read_file(path), path.stem().string(), format, path.string());
}

std::size_t known_size(std::size_t total, double ratio) {
  // Ceiling reproduces 99 -> 70 and 456 -> 320; the epsilon keeps 0.7 * 100 at 70.
  return static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(total) - 1e-9));
}

std::pair<RequirementSet, RequirementSet> split_requirements(const RequirementSet& set,
                                                             const SplitSpec& spec) {
  if (!(spec.ratio > 0.0 && spec.ratio < 1.0))
    throw Error(fmt::format("split ratio {} is outside (0, 1)", spec.ratio));
  if (spec.ratio * static_cast<double>(set.size()) < 1.0)
    throw Error(fmt::format("split ratio {} leaves no known requirements out of {}", spec.ratio,
                            set.size()));

  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(spec.seed, spec.run_index));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  std::size_t k = std::min(known_size(set.size(), spec.ratio), set.size());
  std::vector<bool> known(set.size(), false);
  for (std::size_t i = 0; i < k; ++i) known[order[i]] = true;

  RequirementSet a{set.name + "-known", {}, set.provenance};
  RequirementSet b{set.name + "-holdout", {}, set.provenance};
  for (std::size_t i = 0; i < set.size(); ++i)
    (known[i] ? a : b).requirements.push_back(set.requirements[i]);
  return {std::move(a), std::move(b)};
}

nlohmann::json to_json(const Requirement& req) {
  nlohmann::json toks = nlohmann::json::array();
  for (auto& t : req.tokens)
    toks.push_back({{"surface", t.surface}, {"norm", t.norm}, {"pos", to_string(t.pos)}});
  return {{"schema", kSchemaVersion}, {"id", req.id}, {"text", req.text}, {"tokens", toks}};
}

Requirement requirement_from_json(const nlohmann::json& j) {
  Requirement req{j.at("id").get<std::string>(), j.at("text").get<std::string>(), {}};
  for (auto& t : j.at("tokens")) {
    auto pos = parse_pos(t.at("pos").get<std::string>());
    if (!pos) throw Error("requirements.jsonl: bad POS tag " + t.at("pos").dump());
    req.tokens.push_back(Token{t.at("surface"), t.at("norm"), *pos});
  }
  return req;
}

std::string to_jsonl(const RequirementSet& set) {
  std::string out;
  for (auto& r : set.requirements) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

RequirementSet requirements_from_jsonl(std::string_view content, std::string name) {
  RequirementSet set;
  set.name = std::move(name);
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = trim(content.substr(start, end - start));
    if (!line.empty()) set.requirements.push_back(requirement_from_json(nlohmann::json::parse(line)));
    start = end + 1;
  }
  return set;
}

}  // namespace reqplumb
