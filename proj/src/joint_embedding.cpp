#include "reqplumb/joint_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "reqplumb/text.hpp"

namespace reqplumb {

double score_z(const Vec& h, const Vec& r, const Vec& t, double b) {
  if (h.size() != r.size() || r.size() != t.size())
    throw Error(fmt::format("score_z: dimension mismatch ({}, {}, {})", h.size(), r.size(), t.size()));
  return b - 0.5 * (h + r - t).squaredNorm();
}

TermVocabulary build_term_vocabulary(const RequirementSet& reqs, const std::vector<std::string>& mwts,
                                     const StopWords& stopwords) {
  std::map<std::vector<std::string>, std::string> by_words;
  std::size_t longest = 1;
  for (auto& m : mwts) {
    auto words = split_ws(m);
    if (words.empty()) continue;
    longest = std::max(longest, words.size());
    by_words.emplace(std::move(words), m);
  }
  TermVocabulary vocab;
  std::set<std::string> all;
  for (auto& m : by_words) all.insert(m.second);
  for (auto& req : reqs.requirements) {
    std::set<std::string> found;
    auto& toks = req.tokens;
    std::size_t i = 0;
    while (i < toks.size()) {
      std::size_t matched = 0;
      for (std::size_t len = std::min(longest, toks.size() - i); len >= 1; --len) {
        std::vector<std::string> words;
        for (std::size_t k = i; k < i + len; ++k) words.push_back(toks[k].norm);
        if (auto it = by_words.find(words); it != by_words.end()) {
          found.insert(it->second);
          matched = len;
          break;
        }
      }
      if (matched) {
        i += matched;
        continue;
      }
      if (toks[i].pos == Pos::Noun && !stopwords.count(toks[i].norm)) {
        found.insert(toks[i].norm);
        all.insert(toks[i].norm);
      }
      ++i;
    }
    vocab.per_requirement.emplace_back(found.begin(), found.end());
  }
  vocab.terms.assign(all.begin(), all.end());
  return vocab;
}

std::vector<std::pair<std::string, std::string>> requirement_cooccurrence(const TermVocabulary& vocab) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto& terms : vocab.per_requirement)
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = i + 1; j < terms.size(); ++j) out.emplace(terms[i], terms[j]);
  return {out.begin(), out.end()};
}

std::string entity_key(std::string_view iri) { return fmt::format("entity:{}", iri); }
std::string term_key(std::string_view text) { return fmt::format("term:{}", text); }

std::vector<NamedTriplet> alignment_triplets(const std::vector<FactTriple>& triples, const MappingSet& mapping) {
  std::set<NamedTriplet> out;
  for (auto& f : triples) {
    auto wh = mapping.terms_for(f.h);
    auto wt = mapping.terms_for(f.t);
    for (auto& w : wh) out.insert({term_key(w), f.r, entity_key(f.t)});
    for (auto& w : wt) out.insert({entity_key(f.h), f.r, term_key(w)});
    for (auto& a : wh)
      for (auto& b : wt) out.insert({term_key(a), f.r, term_key(b)});
  }
  return {out.begin(), out.end()};
}

std::optional<std::size_t> EmbeddingSpace::node_index(std::string_view key) const {
  auto find_in = [](const std::vector<std::string>& v, std::string_view name) -> std::optional<std::size_t> {
    auto it = std::lower_bound(v.begin(), v.end(), name);
    if (it == v.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
  };
  if (key.starts_with("entity:")) return find_in(entities, key.substr(7));
  if (key.starts_with("term:")) {
    auto i = find_in(terms, key.substr(5));
    if (i) return *i + entities.size();
  }
  return std::nullopt;
}

std::optional<std::size_t> EmbeddingSpace::relation_index(std::string_view iri) const {
  auto it = std::lower_bound(relations.begin(), relations.end(), iri);
  if (it == relations.end() || *it != iri) return std::nullopt;
  return static_cast<std::size_t>(it - relations.begin());
}

std::optional<Vec> EmbeddingSpace::entity_vec(std::string_view iri) const {
  auto i = node_index(entity_key(iri));
  if (!i) return std::nullopt;
  return Vec(nodes.row(static_cast<Eigen::Index>(*i)).transpose());
}

std::optional<Vec> EmbeddingSpace::term_vec(std::string_view text) const {
  auto i = node_index(term_key(text));
  if (!i) return std::nullopt;
  return Vec(nodes.row(static_cast<Eigen::Index>(*i)).transpose());
}

std::optional<Vec> EmbeddingSpace::relation_vec(std::string_view iri) const {
  auto i = relation_index(iri);
  if (!i) return std::nullopt;
  return Vec(rel.row(static_cast<Eigen::Index>(*i)).transpose());
}

std::string EmbeddingSpace::node_key(std::size_t row) const {
  return row < entities.size() ? entity_key(entities[row]) : term_key(terms[row - entities.size()]);
}

EmbeddingSpace make_space(const DomainModel& model, const TermVocabulary& vocab, int dim, double bias) {
  if (dim < 2) throw Error(fmt::format("embedding dimension must be >= 2, got {}", dim));
  EmbeddingSpace s;
  s.dim = dim;
  s.bias = bias;
  for (auto& e : model.entities()) s.entities.push_back(e.iri);
  std::set<std::string> rels;
  for (auto& t : model.triples()) rels.insert(t.r);
  s.relations.assign(rels.begin(), rels.end());
  s.terms = vocab.terms;
  std::sort(s.terms.begin(), s.terms.end());
  s.nodes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.entities.size() + s.terms.size()), dim);
  s.rel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.relations.size()), dim);
  return s;
}

JointProblem make_problem(const EmbeddingSpace& space, const DomainModel& model,
                          const std::vector<std::pair<std::string, std::string>>& pairs,
                          const std::vector<NamedTriplet>& alignment) {
  JointProblem p;
  auto node = [&](const std::string& key) {
    auto i = space.node_index(key);
    if (!i) throw Error(fmt::format("no vector slot for {}", key));
    return *i;
  };
  auto relation = [&](const std::string& iri) {
    auto i = space.relation_index(iri);
    if (!i) throw Error(fmt::format("no vector slot for relation {}", iri));
    return *i;
  };
  for (auto& f : model.triples()) p.knowledge.push_back({node(entity_key(f.h)), relation(f.r), node(entity_key(f.t))});
  for (auto& [a, b] : pairs) {
    auto wa = node(term_key(a)), wb = node(term_key(b));
    p.requirement.emplace_back(wa, wb);
    p.requirement.emplace_back(wb, wa);
  }
  for (auto& a : alignment) p.alignment.push_back({node(a.h), relation(a.r), node(a.t)});
  return p;
}

void initialize(EmbeddingSpace& space, const TrainConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, 0x6a6f696e74ULL));
  double bound = 6.0 / std::sqrt(static_cast<double>(space.dim));
  auto fill = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        m(i, j) = cfg.integer_init ? static_cast<double>(uniform_index(rng, 3)) - 1.0 : uniform(rng, -bound, bound);
  };
  fill(space.nodes);
  fill(space.rel);
}

namespace {

// Candidate rows: either [offset, offset + n) or an explicit list.
struct Cands {
  std::size_t offset = 0;
  std::size_t n = 0;
  const std::vector<std::size_t>* list = nullptr;

  std::size_t size() const { return list ? list->size() : n; }
  std::size_t operator[](std::size_t i) const { return list ? (*list)[i] : offset + i; }
};

double log_sum_exp(const Vec& z) {
  double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

// -log softmax of the true candidate where candidate c has residual e_c and
// z_c = b - |e_c|^2 / 2. `residual(c)` returns e_c; `push(c, g)` adds g to the
// gradient w.r.t. e_c-dependent parameters (g = dL/de_c).
template <class Residual, class Push>
double neg_log_softmax(const Cands& cands, std::size_t truth, double b, Residual residual, Push push, bool want_grad) {
  const auto n = cands.size();
  Vec z(ix(n));
  std::vector<Vec> res;
  res.reserve(n);
  std::size_t truth_pos = n;
  for (std::size_t i = 0; i < n; ++i) {
    res.push_back(residual(cands[i]));
    z(ix(i)) = b - 0.5 * res.back().squaredNorm();
    if (cands[i] == truth) truth_pos = i;
  }
  if (truth_pos == n) throw Error("true candidate missing from candidate set");
  double lse = log_sum_exp(z);
  if (want_grad) {
    // dL/dz_c = p_c - [c = truth]; dz_c/de_c = -e_c.
    for (std::size_t i = 0; i < n; ++i) {
      double p = std::exp(z(ix(i)) - lse) - (i == truth_pos ? 1.0 : 0.0);
      if (p != 0.0) push(cands[i], Vec(-p * res[i]));
    }
  }
  return lse - z(ix(truth_pos));
}

double fact_term(const EmbeddingSpace& s, const Triplet& f, const Cands& nodes_c, const Cands& rel_c,
                 const Cands& tail_c, Gradients* g) {
  const auto& N = s.nodes;
  const auto& R = s.rel;
  Vec h = N.row(ix(f.h)).transpose(), r = R.row(ix(f.r)).transpose(), t = N.row(ix(f.t)).transpose();
  bool want = g != nullptr;
  double loss = 0;
  // e = h + r - t; de/dh = I, de/dr = I, de/dt = -I.
  loss += neg_log_softmax(
      nodes_c, f.h, s.bias, [&](std::size_t c) -> Vec { return N.row(ix(c)).transpose() + r - t; },
      [&](std::size_t c, const Vec& gr) {
        g->nodes.row(ix(c)) += gr.transpose();
        g->rel.row(ix(f.r)) += gr.transpose();
        g->nodes.row(ix(f.t)) -= gr.transpose();
      },
      want);
  loss += neg_log_softmax(
      rel_c, f.r, s.bias, [&](std::size_t c) -> Vec { return h + R.row(ix(c)).transpose() - t; },
      [&](std::size_t c, const Vec& gr) {
        g->nodes.row(ix(f.h)) += gr.transpose();
        g->rel.row(ix(c)) += gr.transpose();
        g->nodes.row(ix(f.t)) -= gr.transpose();
      },
      want);
  loss += neg_log_softmax(
      tail_c, f.t, s.bias, [&](std::size_t c) -> Vec { return h + r - N.row(ix(c)).transpose(); },
      [&](std::size_t c, const Vec& gr) {
        g->nodes.row(ix(f.h)) += gr.transpose();
        g->rel.row(ix(f.r)) += gr.transpose();
        g->nodes.row(ix(c)) -= gr.transpose();
      },
      want);
  return loss;
}

double pair_term(const EmbeddingSpace& s, std::size_t w, std::size_t v, const Cands& terms_c, Gradients* g) {
  const auto& N = s.nodes;
  Vec vv = N.row(ix(v)).transpose();
  // e = w~ - v.
  return neg_log_softmax(
      terms_c, w, s.bias, [&](std::size_t c) -> Vec { return N.row(ix(c)).transpose() - vv; },
      [&](std::size_t c, const Vec& gr) {
        g->nodes.row(ix(c)) += gr.transpose();
        g->nodes.row(ix(v)) -= gr.transpose();
      },
      g != nullptr);
}

Gradients zero_grad(const EmbeddingSpace& s) {
  return {Eigen::MatrixXd::Zero(s.nodes.rows(), s.nodes.cols()), Eigen::MatrixXd::Zero(s.rel.rows(), s.rel.cols())};
}

Cands entity_cands(const EmbeddingSpace& s) { return {0, s.entities.size(), nullptr}; }
Cands all_node_cands(const EmbeddingSpace& s) { return {0, static_cast<std::size_t>(s.nodes.rows()), nullptr}; }
Cands relation_cands(const EmbeddingSpace& s) { return {0, s.relations.size(), nullptr}; }
Cands term_cands(const EmbeddingSpace& s) { return {s.entities.size(), s.terms.size(), nullptr}; }

}  // namespace

double fact_likelihood(const EmbeddingSpace& space, const Triplet& f, std::size_t node_candidates) {
  if (node_candidates == 0 || space.relations.empty()) throw Error("fact likelihood over an empty candidate set");
  Cands nodes{0, node_candidates, nullptr};
  return -fact_term(space, f, nodes, relation_cands(space), nodes, nullptr);
}

Vec head_distribution(const EmbeddingSpace& space, const Triplet& f, std::size_t node_candidates) {
  Vec z(ix(node_candidates));
  Vec r = space.rel.row(ix(f.r)).transpose(), t = space.nodes.row(ix(f.t)).transpose();
  for (std::size_t c = 0; c < node_candidates; ++c)
    z(ix(c)) = score_z(space.nodes.row(ix(c)).transpose(), r, t, space.bias);
  return (z.array() - log_sum_exp(z)).exp();
}

Vec term_distribution(const EmbeddingSpace& space, std::size_t v) {
  auto tc = term_cands(space);
  Vec z(ix(tc.size()));
  Vec vv = space.nodes.row(ix(v)).transpose();
  Vec zero = Vec::Zero(space.dim);
  for (std::size_t i = 0; i < tc.size(); ++i)
    z(ix(i)) = score_z(space.nodes.row(ix(tc[i])).transpose(), zero, vv, space.bias);
  return (z.array() - log_sum_exp(z)).exp();
}

double knowledge_loss(const EmbeddingSpace& space, const std::vector<Triplet>& triples) {
  double loss = 0;
  for (auto& f : triples) loss += fact_term(space, f, entity_cands(space), relation_cands(space), entity_cands(space), nullptr);
  return loss;
}

double requirement_loss(const EmbeddingSpace& space, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double loss = 0;
  for (auto& [w, v] : pairs) loss += pair_term(space, w, v, term_cands(space), nullptr);
  return loss;
}

double alignment_loss(const EmbeddingSpace& space, const std::vector<Triplet>& triples) {
  double loss = 0;
  for (auto& f : triples)
    loss += fact_term(space, f, all_node_cands(space), relation_cands(space), all_node_cands(space), nullptr);
  return loss;
}

LossBreakdown joint_loss(const EmbeddingSpace& space, const JointProblem& problem, Gradients* grad) {
  if (grad) *grad = zero_grad(space);
  LossBreakdown l;
  for (auto& f : problem.knowledge)
    l.knowledge += fact_term(space, f, entity_cands(space), relation_cands(space), entity_cands(space), grad);
  for (auto& [w, v] : problem.requirement) l.requirement += pair_term(space, w, v, term_cands(space), grad);
  for (auto& f : problem.alignment)
    l.alignment += fact_term(space, f, all_node_cands(space), relation_cands(space), all_node_cands(space), grad);
  l.total = l.knowledge + l.requirement + l.alignment;
  return l;
}

TrainingDiverged::TrainingDiverged(int epoch_, EmbeddingSpace checkpoint_, std::vector<EpochLog> log_)
    : Error(fmt::format("joint training diverged at epoch {} (loss is not finite); last good state is epoch {}",
                        epoch_, epoch_ - 1)),
      epoch(epoch_),
      checkpoint(std::move(checkpoint_)),
      log(std::move(log_)) {}

namespace {

enum class ItemKind { Knowledge, Requirement, Alignment };

struct Item {
  ItemKind kind;
  std::size_t a, b, c;
};

// Draws up to k distinct rows from cands other than `truth`, plus `truth`.
std::vector<std::size_t> sample_cands(const Cands& full, std::size_t truth, std::size_t k, Rng& rng) {
  std::vector<std::size_t> out{truth};
  if (full.size() <= k + 1) {
    out.clear();
    for (std::size_t i = 0; i < full.size(); ++i) out.push_back(full[i]);
    return out;
  }
  std::set<std::size_t> seen{truth};
  while (out.size() < k + 1) {
    auto c = full[uniform_index(rng, full.size())];
    if (seen.insert(c).second) out.push_back(c);
  }
  return out;
}

double item_loss(const EmbeddingSpace& s, const Item& it, const TrainConfig& cfg, Rng& rng, Gradients* g,
                 LossBreakdown& acc) {
  bool sampled = cfg.softmax == SoftmaxMode::Sampled;
  switch (it.kind) {
    case ItemKind::Knowledge:
    case ItemKind::Alignment: {
      Triplet f{it.a, it.b, it.c};
      Cands nodes = it.kind == ItemKind::Knowledge ? entity_cands(s) : all_node_cands(s);
      Cands rels = relation_cands(s);
      double l;
      if (sampled) {
        auto hs = sample_cands(nodes, f.h, cfg.sample_k, rng);
        auto rs = sample_cands(rels, f.r, cfg.sample_k, rng);
        auto ts = sample_cands(nodes, f.t, cfg.sample_k, rng);
        Cands hc{0, 0, &hs}, rc{0, 0, &rs}, tc{0, 0, &ts};
        // Head and tail use separate samples; evaluate each conditional once.
        l = fact_term(s, f, hc, rc, tc, g);
      } else {
        l = fact_term(s, f, nodes, rels, nodes, g);
      }
      (it.kind == ItemKind::Knowledge ? acc.knowledge : acc.alignment) += l;
      return l;
    }
    case ItemKind::Requirement: {
      Cands terms = term_cands(s);
      double l;
      if (sampled) {
        auto ws = sample_cands(terms, it.a, cfg.sample_k, rng);
        l = pair_term(s, it.a, it.b, Cands{0, 0, &ws}, g);
      } else {
        l = pair_term(s, it.a, it.b, terms, g);
      }
      acc.requirement += l;
      return l;
    }
  }
  return 0;
}

bool finite(const EmbeddingSpace& s) { return s.nodes.allFinite() && s.rel.allFinite(); }

}  // namespace

TrainResult train(EmbeddingSpace space, const JointProblem& problem, const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw Error("epochs must be >= 0");
  if (cfg.learning_rate <= 0) throw Error("learning rate must be > 0");
  std::vector<Item> items;
  for (auto& f : problem.knowledge) items.push_back({ItemKind::Knowledge, f.h, f.r, f.t});
  for (auto& [w, v] : problem.requirement) items.push_back({ItemKind::Requirement, w, v, 0});
  for (auto& f : problem.alignment) items.push_back({ItemKind::Alignment, f.h, f.r, f.t});

  std::vector<EpochLog> log;
  Rng rng(mix_seed(cfg.seed, 0x747261696eULL));
  const std::size_t batch = cfg.batch_size == 0 ? std::max<std::size_t>(items.size(), 1) : cfg.batch_size;
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EmbeddingSpace last_good = space;
    if (cfg.batch_size != 0)
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    LossBreakdown epoch_loss;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      Gradients g = zero_grad(space);
      for (std::size_t k = start; k < std::min(order.size(), start + batch); ++k)
        item_loss(space, items[order[k]], cfg, rng, &g, epoch_loss);
      space.nodes -= cfg.learning_rate * g.nodes;
      space.rel -= cfg.learning_rate * g.rel;
    }
    epoch_loss.total = epoch_loss.knowledge + epoch_loss.requirement + epoch_loss.alignment;
    if (!std::isfinite(epoch_loss.total)) throw TrainingDiverged(epoch, std::move(last_good), std::move(log));
    log.push_back({epoch, epoch_loss});
    if (!finite(space)) throw TrainingDiverged(epoch + 1, std::move(last_good), std::move(log));
  }
  return {std::move(space), std::move(log)};
}

JointInputs prepare_joint_inputs(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                                 const MappingSet& mapping, const StopWords& stopwords) {
  JointInputs in;
  in.vocab = build_term_vocabulary(known, rt.labels(), stopwords);
  in.pairs = requirement_cooccurrence(in.vocab);
  // Mapped terms need a vector even when they never matched greedily.
  std::set<std::string> terms(in.vocab.terms.begin(), in.vocab.terms.end());
  for (auto& t : mapping.mapped_term_set()) terms.insert(t);
  in.vocab.terms.assign(terms.begin(), terms.end());
  in.alignment = alignment_triplets(model.triples(), mapping);
  return in;
}

TrainResult train_joint(const DomainModel& model, const JointInputs& inputs, const TrainConfig& cfg) {
  auto space = make_space(model, inputs.vocab, cfg.dim, cfg.bias);
  auto problem = make_problem(space, model, inputs.pairs, inputs.alignment);
  initialize(space, cfg);
  return train(std::move(space), problem, cfg);
}

nlohmann::json to_json(const EmbeddingSpace& space) {
  auto row = [](const Eigen::MatrixXd& m, std::size_t i) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<std::size_t>(j)] = m(ix(i), j);
    return v;
  };
  nlohmann::json vectors = nlohmann::json::object();
  for (std::size_t i = 0; i < static_cast<std::size_t>(space.nodes.rows()); ++i)
    vectors[space.node_key(i)] = row(space.nodes, i);
  for (std::size_t i = 0; i < space.relations.size(); ++i)
    vectors["relation:" + space.relations[i]] = row(space.rel, i);
  return {{"schema", kSchemaVersion},
          {"dim", space.dim},
          {"b", space.bias},
          {"entities", space.entities},
          {"terms", space.terms},
          {"relations", space.relations},
          {"vectors", vectors}};
}

EmbeddingSpace space_from_json(const nlohmann::json& j) {
  EmbeddingSpace s;
  s.dim = j.at("dim").get<int>();
  s.bias = j.at("b").get<double>();
  s.entities = j.at("entities").get<std::vector<std::string>>();
  s.terms = j.at("terms").get<std::vector<std::string>>();
  s.relations = j.at("relations").get<std::vector<std::string>>();
  s.nodes.resize(ix(s.entities.size() + s.terms.size()), s.dim);
  s.rel.resize(ix(s.relations.size()), s.dim);
  auto& vectors = j.at("vectors");
  auto load = [&](Eigen::MatrixXd& m, std::size_t i, const std::string& key) {
    auto v = vectors.at(key).get<std::vector<double>>();
    if (static_cast<int>(v.size()) != s.dim) throw Error(fmt::format("vector {} has wrong dimension", key));
    for (int k = 0; k < s.dim; ++k) m(ix(i), k) = v[static_cast<std::size_t>(k)];
  };
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.nodes.rows()); ++i) load(s.nodes, i, s.node_key(i));
  for (std::size_t i = 0; i < s.relations.size(); ++i) load(s.rel, i, "relation:" + s.relations[i]);
  return s;
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,L,L_K,L_R,L_A\n";
  for (auto& e : log)
    out += fmt::format("{},{:.10g},{:.10g},{:.10g},{:.10g}\n", e.epoch, e.loss.total, e.loss.knowledge,
                       e.loss.requirement, e.loss.alignment);
  return out;
}

}  // namespace reqplumb
