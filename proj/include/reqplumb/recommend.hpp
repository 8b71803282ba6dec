#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/regularity.hpp"
#include "reqplumb/synonyms.hpp"

namespace reqplumb {

enum class Strategy { None, EntityType, NodeType, FamilyBelonging, Combination };

constexpr Strategy kAllStrategies[] = {Strategy::None, Strategy::EntityType, Strategy::NodeType,
                                       Strategy::FamilyBelonging, Strategy::Combination};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct Recommendation {
  Strategy strategy = Strategy::None;
  std::vector<std::string> entities;  // IRIs, ordered by (label, iri)
};

// Candidates are entities outside `mapped`. FamilyBelonging and Combination
// need `families`.
Recommendation recommend(const DomainModel& model, const HierarchyTree& tree, const std::set<std::string>& mapped,
                         Strategy strategy, const FamilySelection* families = nullptr);

double f2_score(double precision, double recall);

struct Metrics {
  double recall = 0, precision = 0, f2 = 0;
  std::size_t gold = 0, gold_hit = 0, recommended = 0, recommended_hit = 0;
};

// Matches a label against gold terms by equality or accepted synonymy.
class GoldMatcher {
 public:
  GoldMatcher(std::vector<std::string> gold, const std::vector<SynonymPair>& accepted);

  // Gold terms hit by this label.
  std::vector<std::string> hits(const std::string& label) const;
  const std::vector<std::string>& gold() const { return gold_; }

 private:
  std::vector<std::string> gold_;
  std::set<std::string> gold_set_;
  std::map<std::string, std::set<std::string>> syn_;
};

Metrics evaluate(const Recommendation& rec, const DomainModel& model, const GoldMatcher& gold);

struct FamilyBreakdown {
  std::string root;
  std::string label;
  std::size_t actually = 0;     // gold terms hit by recommendations inside the family
  std::size_t should_have = 0;  // gold terms matching any unmapped entity in the family
  Metrics metrics;
};

std::vector<FamilyBreakdown> family_breakdown(const DomainModel& model, const HierarchyTree& tree,
                                              const std::set<std::string>& mapped, const FamilySelection& families,
                                              const GoldMatcher& gold);

// Holdout terms that are genuinely missing: not a known requirement term or
// a synonym of one, and not naming an already-mapped entity.
std::vector<std::string> gold_terms(const std::vector<std::string>& holdout_terms,
                                    const std::vector<std::string>& known_terms,
                                    const std::vector<SynonymPair>& accepted, const DomainModel& model,
                                    const std::set<std::string>& mapped_entities);

nlohmann::json to_json(const Recommendation& r, const DomainModel& model);
nlohmann::json to_json(const Metrics& m);

}  // namespace reqplumb
