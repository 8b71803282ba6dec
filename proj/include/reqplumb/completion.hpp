#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/joint_embedding.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/synonyms.hpp"

namespace reqplumb {

struct CosineStats {
  double mean = 0, stddev = 0;
  std::size_t pairs = 0;
  // cos(child - parent, downward hierarchy vector) over the same edges; used
  // to decide which end of an accepted pair is the parent.
  bool has_direction = false;
  double dir_mean = 0, dir_stddev = 0;
};

// Deviation |x - mean| / stddev; with stddev 0 this is 0 on the mean and
// infinite elsewhere.
double deviation(double x, double mean, double stddev);

// Statistics over every parent/child edge of `tree`. Throws with fewer than two edges.
CosineStats reference_cosine_stats(const EmbeddingSpace& space, const HierarchyTree& tree,
                                   const DomainModel& model);

struct ProposedLink {
  std::string parent;  // node key, "entity:<iri>" or "term:<text>"
  std::string child;
  double cosine = 0;
  double deviation = 0;

  auto operator<=>(const ProposedLink&) const = default;
};

// Scans every unmapped term against model Classes and the other unmapped
// terms; accepted links have deviation <= tau.
std::vector<ProposedLink> propose_links(const std::vector<std::string>& unmapped_terms, const EmbeddingSpace& space,
                                        const DomainModel& model, const CosineStats& stats, double tau);

struct CompletedModel {
  DomainModel model;                          // base plus added entities and links
  std::map<std::string, std::string> added;   // term text -> IRI
  std::vector<FactTriple> added_links;
  HierarchyTree tree;
  std::set<std::string> considered_terms;     // every term a completion run has examined
  std::vector<std::string> unadded;           // considered but left out
  std::vector<std::string> warnings;
  std::size_t base_hierarchy_links = 0;
};

std::string added_entity_iri(std::string_view term);

// The hierarchy predicate IRI and direction used by most of the model's hierarchy triples.
HierarchyPredicate dominant_hierarchy_predicate(const DomainModel& model, std::string* iri);

// Applies the adjustment rules and inserts accepted links so that every added
// term hangs below an original entity. `considered` lists all scanned terms.
CompletedModel restructure(const DomainModel& base, const std::vector<ProposedLink>& proposals,
                           const std::vector<std::string>& considered);

struct CompletionOptions {
  double tau = 1.0;
};

// Full completion step. Terms already in `previous.considered_terms` are skipped.
CompletedModel complete_model(const DomainModel& base, const EmbeddingSpace& space, const MappingSet& mapping,
                              const std::vector<std::string>& vocabulary, const CompletionOptions& opts,
                              const std::set<std::string>& previously_considered = {});

struct CompletionReport {
  std::size_t added_entities = 0;
  std::size_t added_links = 0;
  std::size_t total_hierarchy_links = 0;
  std::size_t rt_size = 0;
  std::size_t mapped_before = 0;
  std::size_t mapped_after = 0;
  double rate_before = 0, rate_after = 0;
};

CompletionReport completion_report(const CompletedModel& cm, const DomainModel& base, const std::vector<std::string>& rt,
                                   const std::vector<SynonymPair>& accepted);

nlohmann::json to_json(const CompletedModel& cm);
CompletedModel completed_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CompletionReport& r);
nlohmann::json to_json(const CosineStats& s);

}  // namespace reqplumb
