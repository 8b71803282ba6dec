#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/requirements.hpp"
#include "reqplumb/synonyms.hpp"
#include "reqplumb/terms.hpp"

namespace reqplumb {

enum class MappingKind { Direct, Synonym };

std::string_view to_string(MappingKind k);

struct MappingPair {
  std::string term;
  std::string entity;  // IRI
  std::string label;   // entity label at mapping time
  MappingKind kind = MappingKind::Direct;

  auto operator<=>(const MappingPair&) const = default;
};

struct MappingSet {
  std::vector<MappingPair> pairs;  // sorted, unique
  std::size_t rt_size = 0;
  std::size_t mapped_terms = 0;
  double rate = 0.0;
  std::optional<Category> restrict_to;

  std::set<std::string> mapped_entities() const;
  std::set<std::string> mapped_term_set() const;
  std::vector<std::string> entities_for(std::string_view term) const;
  std::vector<std::string> terms_for(std::string_view entity) const;
};

// Direct pairs by normalized label equality, Synonym pairs from `accepted`.
// Throws when `rt` is empty.
MappingSet build_mapping(const std::vector<std::string>& rt, const DomainModel& model,
                         const std::vector<SynonymPair>& accepted,
                         std::optional<Category> restrict_to = Category::Classes);

struct MethodRow {
  std::string method;
  std::size_t terms = 0;
  std::size_t mapped = 0;
  double rate = 0.0;
};

// NNs/NPs baseline, C-Value terms alone, and C-Value terms with synonyms.
std::vector<MethodRow> compare_mapping_methods(const RequirementSet& known, const StopWords& stopwords,
                                               const TermSet& cvalue_terms, const DomainModel& model,
                                               const std::vector<SynonymPair>& accepted,
                                               std::optional<Category> restrict_to = Category::Classes);

nlohmann::json to_json(const MappingSet& m);
MappingSet mapping_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<MethodRow>& rows);

}  // namespace reqplumb
