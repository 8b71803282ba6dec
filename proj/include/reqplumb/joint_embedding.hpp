#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "reqplumb/common.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/requirements.hpp"
#include "reqplumb/terms.hpp"

namespace reqplumb {

using Vec = Eigen::VectorXd;

double score_z(const Vec& h, const Vec& r, const Vec& t, double b);

// Requirement terms: selected MWTs plus the nouns left uncovered by them.
struct TermVocabulary {
  std::vector<std::string> terms;                        // sorted, unique
  std::vector<std::vector<std::string>> per_requirement;  // distinct terms found in each requirement
};

// Terms are matched greedily, longest first, without overlap.
TermVocabulary build_term_vocabulary(const RequirementSet& reqs, const std::vector<std::string>& mwts,
                                     const StopWords& stopwords);

// Unordered pairs (a < b) of terms sharing a requirement.
std::vector<std::pair<std::string, std::string>> requirement_cooccurrence(const TermVocabulary& vocab);

// Node keys are "entity:<iri>" or "term:<text>"; relations are predicate IRIs.
struct NamedTriplet {
  std::string h, r, t;
  auto operator<=>(const NamedTriplet&) const = default;
};

std::string entity_key(std::string_view iri);
std::string term_key(std::string_view text);

std::vector<NamedTriplet> alignment_triplets(const std::vector<FactTriple>& triples, const MappingSet& mapping);

enum class SoftmaxMode { Full, Sampled };

struct TrainConfig {
  int dim = 50;
  int epochs = 500;
  double learning_rate = 0.01;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 42;
  double bias = 7.0;
  SoftmaxMode softmax = SoftmaxMode::Full;
  std::size_t sample_k = 25;
  bool integer_init = false;  // draw initial components from {-1, 0, 1}
};

struct EmbeddingSpace {
  int dim = 0;
  double bias = 7.0;
  std::vector<std::string> entities;   // IRIs
  std::vector<std::string> terms;      // texts
  std::vector<std::string> relations;  // predicate IRIs
  Eigen::MatrixXd nodes;               // rows: entities, then terms
  Eigen::MatrixXd rel;

  std::optional<std::size_t> node_index(std::string_view key) const;
  std::optional<std::size_t> relation_index(std::string_view iri) const;
  std::optional<Vec> entity_vec(std::string_view iri) const;
  std::optional<Vec> term_vec(std::string_view text) const;
  std::optional<Vec> relation_vec(std::string_view iri) const;
  std::size_t entity_count() const { return entities.size(); }
  std::string node_key(std::size_t row) const;
};

// Index-level training problem.
struct Triplet {
  std::size_t h, r, t;
};

struct JointProblem {
  std::vector<Triplet> knowledge;
  std::vector<std::pair<std::size_t, std::size_t>> requirement;  // (w, v) node rows, both directions present
  std::vector<Triplet> alignment;
};

// Empty space with entity/term/relation names, built from model, vocabulary
// and alignment. Vectors are left zero.
EmbeddingSpace make_space(const DomainModel& model, const TermVocabulary& vocab, int dim, double bias);
JointProblem make_problem(const EmbeddingSpace& space, const DomainModel& model,
                          const std::vector<std::pair<std::string, std::string>>& pairs,
                          const std::vector<NamedTriplet>& alignment);

void initialize(EmbeddingSpace& space, const TrainConfig& cfg);

struct LossBreakdown {
  double total = 0, knowledge = 0, requirement = 0, alignment = 0;
};

struct Gradients {
  Eigen::MatrixXd nodes;
  Eigen::MatrixXd rel;
};

// Log-likelihood of a fact over full candidate sets: entity rows [0, node_candidates)
// for h and t, every relation for r.
double fact_likelihood(const EmbeddingSpace& space, const Triplet& f, std::size_t node_candidates);

// Pr(h~ | r, t) for every candidate head; used to check normalization.
Vec head_distribution(const EmbeddingSpace& space, const Triplet& f, std::size_t node_candidates);
// Pr(w~ | v) over every term row.
Vec term_distribution(const EmbeddingSpace& space, std::size_t v);

double knowledge_loss(const EmbeddingSpace& space, const std::vector<Triplet>& triples);
double requirement_loss(const EmbeddingSpace& space, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
double alignment_loss(const EmbeddingSpace& space, const std::vector<Triplet>& triples);

// Full-softmax loss, optionally accumulating its gradient.
LossBreakdown joint_loss(const EmbeddingSpace& space, const JointProblem& problem, Gradients* grad = nullptr);

struct EpochLog {
  int epoch;
  LossBreakdown loss;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(int epoch, EmbeddingSpace checkpoint, std::vector<EpochLog> log);
  int epoch;
  EmbeddingSpace checkpoint;
  std::vector<EpochLog> log;
};

struct TrainResult {
  EmbeddingSpace space;
  std::vector<EpochLog> log;
};

// Gradient descent on L_K + L_R + L_A starting from `space` as given.
TrainResult train(EmbeddingSpace space, const JointProblem& problem, const TrainConfig& cfg);

struct JointInputs {
  TermVocabulary vocab;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<NamedTriplet> alignment;
};

JointInputs prepare_joint_inputs(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                                 const MappingSet& mapping, const StopWords& stopwords);

TrainResult train_joint(const DomainModel& model, const JointInputs& inputs, const TrainConfig& cfg);

nlohmann::json to_json(const EmbeddingSpace& space);
EmbeddingSpace space_from_json(const nlohmann::json& j);
std::string training_log_csv(const std::vector<EpochLog>& log);

}  // namespace reqplumb
