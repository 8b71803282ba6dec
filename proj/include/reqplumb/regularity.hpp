#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/requirements.hpp"

namespace reqplumb {

struct EntityTypeDistribution {
  std::map<Category, std::size_t> counts;
  std::size_t total = 0;
  std::vector<std::string> warnings;

  double fraction(Category c) const;
};

// Over the entities of an unrestricted mapping.
EntityTypeDistribution entity_type_distribution(const MappingSet& mapping, const DomainModel& model);

struct PositionDistribution {
  std::size_t root = 0, intermediate = 0, leaf = 0, untracked = 0;

  std::size_t tracked() const { return root + intermediate + leaf; }
  double leaf_fraction() const;
};

PositionDistribution node_position_distribution(const std::set<std::string>& mapped, const HierarchyTree& tree);

// (|mapped ∩ descendants(node)| / |mapped|) · level(node).
double ahme(const HierarchyTree& tree, const std::set<std::string>& mapped, const std::string& node);

struct FamilyRule {
  enum class Kind { TopK, Relative } kind = Kind::Relative;
  std::size_t k = 3;
  double alpha = 0.5;
};

// "top_k(3)" or "relative(0.5)".
FamilyRule parse_family_rule(std::string_view s);
std::string to_string(const FamilyRule& r);

struct FamilyRoot {
  std::string node;
  std::string label;
  double ahme = 0;
  int level = 0;
  std::size_t mapped_descendants = 0;
};

struct FamilySelection {
  FamilyRule rule;
  std::vector<FamilyRoot> roots;
  std::set<std::string> scope;  // selected roots and everything below them
  std::size_t classes_total = 0;
  std::vector<FamilyRoot> ranking;  // every node with AHME > 0, best first

  double scope_fraction() const;
};

FamilySelection select_families(const HierarchyTree& tree, const DomainModel& model, const std::set<std::string>& mapped,
                                const FamilyRule& rule);

struct RequirementSideStats {
  std::size_t requirements = 0;
  std::size_t with_mapped = 0;
  std::size_t with_two_plus = 0;
  std::size_t with_juxtaposition = 0;

  double mapped_fraction() const;
  double two_plus_fraction() const;  // among requirements with a mapped term
  double juxtaposition_fraction() const;
};

// Mapped terms are located by greedy longest match; a juxtaposition is two
// mapped terms separated by a single coordinating conjunction.
RequirementSideStats requirement_side_stats(const RequirementSet& known, const MappingSet& mapping);

nlohmann::json to_json(const EntityTypeDistribution& d);
nlohmann::json to_json(const PositionDistribution& d);
nlohmann::json to_json(const FamilySelection& f);
FamilySelection families_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RequirementSideStats& s);

}  // namespace reqplumb
