#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/completion.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/joint_embedding.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/recommend.hpp"
#include "reqplumb/regularity.hpp"
#include "reqplumb/requirements.hpp"
#include "reqplumb/synonyms.hpp"
#include "reqplumb/terms.hpp"
#include "reqplumb/word_embeddings.hpp"

namespace reqplumb {

struct ExperimentConfig {
  SplitSpec split;
  double cvalue_threshold = 1.0;
  SynonymOptions synonyms;
  WordEmbeddingConfig words;
  TrainConfig joint;
  CompletionOptions completion;
  bool complete = true;
  FamilyRule family;
  std::optional<Category> restrict_to = Category::Classes;
  std::size_t n_runs = 30;
};

// Everything that stays fixed across runs.
struct ExperimentInputs {
  RequirementSet requirements;  // annotated
  DomainModel model;
  StopWords stopwords;
  SynonymLexicon lexicon;
  WordEmbeddings words;
  Decisions term_decisions;
  Decisions synonym_decisions;
  std::optional<std::vector<std::string>> gold_override;
};

// Word vectors come from the domain corpus plus the requirement text.
WordEmbeddings train_domain_words(const std::vector<Sentence>& corpus, const RequirementSet& requirements,
                                  const WordEmbeddingConfig& cfg);

SplitSpec run_split(const ExperimentConfig& cfg, std::size_t run);

TermSet extract_step(const RequirementSet& reqs, TermSource source, const ExperimentInputs& in,
                     const ExperimentConfig& cfg);

// Entity labels the synonym scan compares against.
std::vector<std::string> model_terms(const DomainModel& model, std::optional<Category> restrict_to);

std::vector<SynonymPair> synonym_step(const TermSet& terms, const ExperimentInputs& in, const ExperimentConfig& cfg,
                                      std::vector<std::string>* warnings = nullptr);

struct Analysis {
  HierarchyTree tree;
  std::set<std::string> mapped;
  EntityTypeDistribution types;
  PositionDistribution positions;
  FamilySelection families;
  RequirementSideStats requirement_side;
};

Analysis analyze_step(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                      const std::vector<SynonymPair>& accepted, const MappingSet& mapping, const ExperimentConfig& cfg);

struct CompletionOutcome {
  JointInputs joint;
  TrainResult trained;
  CompletedModel completed;
};

CompletionOutcome completion_step(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                                  const MappingSet& mapping, const ExperimentInputs& in, const ExperimentConfig& cfg,
                                  std::size_t run);

std::vector<SynonymPair> all_accepted(const std::vector<SynonymPair>& known_pairs,
                                      const std::vector<SynonymPair>& holdout_pairs);

std::vector<std::string> gold_step(const TermSet& holdout_terms, const TermSet& rt, const std::vector<SynonymPair>& accepted,
                                   const DomainModel& model, const MappingSet& mapping, const ExperimentInputs& in);

std::map<Strategy, Metrics> evaluate_strategies(const DomainModel& model, const Analysis& analysis,
                                                const GoldMatcher& gold);

struct RunSummary {
  std::size_t run = 0;
  bool ok = false;
  std::string error;
  std::size_t gold = 0;
  double mapping_rate = 0;
  double completed_mapping_rate = 0;
  std::size_t added_links = 0;
  std::size_t families = 0;
  std::map<Strategy, Metrics> original;
  std::map<Strategy, Metrics> completed;
  std::vector<FamilyBreakdown> breakdown;
};

RunSummary run_once(const ExperimentInputs& in, const ExperimentConfig& cfg, std::size_t run);

struct Gains {
  double recall = 0, precision = 0, f2 = 0;
};

// (new - old) / old per metric; 0 when old is 0.
Gains gains(const Metrics& old_m, const Metrics& new_m);

struct ExperimentReport {
  std::vector<RunSummary> runs;
  std::map<Strategy, Metrics> original_avg;
  std::map<Strategy, Metrics> completed_avg;
  Gains family_gain;   // completed vs original, family strategy
  Gains overall_gain;  // completed family vs original without regularity
  std::size_t completed_runs = 0;
  double seconds = 0;
};

ExperimentReport aggregate(std::vector<RunSummary> runs);
ExperimentReport run_experiment(const ExperimentInputs& in, const ExperimentConfig& cfg);

nlohmann::json to_json(const RunSummary& r);
nlohmann::json to_json(const ExperimentReport& r);
std::string report_csv(const ExperimentReport& r);

}  // namespace reqplumb
