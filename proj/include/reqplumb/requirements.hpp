#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace reqplumb {

enum class Pos { Noun, Verb, Adj, Det, Prep, Conj, Other };

std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view tag);

struct Token {
  std::string surface;
  std::string norm;
  Pos pos = Pos::Noun;

  bool operator==(const Token&) const = default;
};

struct Requirement {
  std::string id;
  std::string text;
  std::vector<Token> tokens;

  bool operator==(const Requirement&) const = default;
};

struct RequirementSet {
  std::string name;
  std::vector<Requirement> requirements;
  std::string provenance;

  std::size_t size() const { return requirements.size(); }
};

enum class RequirementFormat { Auto, OnePerLine, NumberedList };

std::optional<RequirementFormat> parse_requirement_format(std::string_view s);

// Word -> tag lookup with suffix heuristics for words the lexicon lacks.
// Unknown words fall back to NOUN.
class PosLexicon {
 public:
  PosLexicon() = default;

  // Plain text, one `word<TAB>TAG` per line; '#' starts a comment.
  static PosLexicon load(const std::filesystem::path& path);
  static PosLexicon parse(std::string_view content, std::string_view origin = "<memory>");

  void add(std::string word, Pos pos);
  std::optional<Pos> lookup(std::string_view norm) const;
  Pos tag(std::string_view norm) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Pos> entries_;
};

// Splits on whitespace and sentence punctuation; tokens whose normalized form
// is empty are dropped. Tags are left as NOUN.
std::vector<Token> tokenize(std::string_view text);

Requirement tokenize_and_tag(Requirement req, const PosLexicon& lexicon);
RequirementSet annotate(RequirementSet set, const PosLexicon& lexicon);

// Ids are `<name>-<ordinal>`, ordinals 1-based in file order.
RequirementSet parse_requirements(std::string_view content, std::string name,
                                  RequirementFormat format, std::string provenance = {});
RequirementSet load_requirements(const std::filesystem::path& path,
                                 RequirementFormat format = RequirementFormat::Auto);

struct SplitSpec {
  double ratio = 0.7;
  std::uint64_t seed = 42;
  std::uint64_t run_index = 0;
};

// Number of requirements that go to the known side.
std::size_t known_size(std::size_t total, double ratio);

// Random partition; both halves keep file order.
std::pair<RequirementSet, RequirementSet> split_requirements(const RequirementSet& set,
                                                             const SplitSpec& spec);

nlohmann::json to_json(const Requirement& req);
Requirement requirement_from_json(const nlohmann::json& j);
std::string to_jsonl(const RequirementSet& set);
RequirementSet requirements_from_jsonl(std::string_view content, std::string name);

}  // namespace reqplumb
