#include "reqplumb/completion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "reqplumb/text.hpp"

namespace reqplumb {

namespace {

double cos_vec(const Vec& a, const Vec& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  double mean = 0;
  for (auto x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (auto x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

// Unit-free vector pointing from parent to child.
std::optional<Vec> downward(const EmbeddingSpace& space, const DomainModel& model) {
  std::string iri;
  auto hp = dominant_hierarchy_predicate(model, &iri);
  auto r = space.relation_vec(iri);
  if (!r || r->norm() == 0) return std::nullopt;
  return hp.child_to_parent ? Vec(-*r) : *r;
}

}  // namespace

double deviation(double x, double mean, double stddev) {
  double d = std::abs(x - mean);
  if (stddev > 0) return d / stddev;
  return d == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

HierarchyPredicate dominant_hierarchy_predicate(const DomainModel& model, std::string* iri) {
  std::map<std::string, std::size_t> counts;
  for (auto& t : model.triples())
    if (model.is_hierarchy(t)) ++counts[t.r];
  std::string best;
  std::size_t best_n = 0;
  for (auto& [r, n] : counts)
    if (n > best_n) {
      best = r;
      best_n = n;
    }
  if (best_n == 0) {
    auto hp = model.hierarchy_predicates.empty() ? default_hierarchy_predicates().front()
                                                 : model.hierarchy_predicates.front();
    if (iri) {
      auto expanded = rdf::expand_well_known(hp.name);
      *iri = expanded.find(':') == std::string::npos ? "urn:reqplumb:predicate:" + expanded : expanded;
    }
    return hp;
  }
  if (iri) *iri = best;
  return *model.hierarchy_predicate_for(best);
}

CosineStats reference_cosine_stats(const EmbeddingSpace& space, const HierarchyTree& tree,
                                   const DomainModel& model) {
  auto down = downward(space, model);
  std::vector<double> cosines, directional;
  for (auto& [child, parent] : tree.parent_of) {
    auto c = space.entity_vec(child);
    auto p = space.entity_vec(parent);
    if (!c || !p) continue;
    cosines.push_back(cos_vec(*p, *c));
    if (down) directional.push_back(cos_vec(*c - *p, *down));
  }
  if (cosines.size() < 2)
    throw Error(fmt::format("cannot calibrate completion: {} hierarchy edge(s) with vectors, need at least 2",
                            cosines.size()));
  CosineStats s;
  s.pairs = cosines.size();
  std::tie(s.mean, s.stddev) = mean_stddev(cosines);
  if (down) {
    s.has_direction = true;
    std::tie(s.dir_mean, s.dir_stddev) = mean_stddev(directional);
  }
  return s;
}

std::vector<ProposedLink> propose_links(const std::vector<std::string>& unmapped_terms, const EmbeddingSpace& space,
                                        const DomainModel& model, const CosineStats& stats, double tau) {
  if (tau < 0) throw Error("completion tolerance must be >= 0");
  auto down = stats.has_direction ? downward(space, model) : std::nullopt;

  std::vector<std::pair<std::string, Vec>> terms, classes;
  std::set<std::string> unique(unmapped_terms.begin(), unmapped_terms.end());
  for (auto& t : unique)
    if (auto v = space.term_vec(t)) terms.emplace_back(term_key(t), std::move(*v));
  for (auto& e : model.entities())
    if (e.category == Category::Classes)
      if (auto v = space.entity_vec(e.iri)) classes.emplace_back(entity_key(e.iri), std::move(*v));

  std::vector<ProposedLink> out;
  auto consider = [&](const std::string& u, const Vec& uv, const std::string& c, const Vec& cv) {
    double cs = cos_vec(uv, cv);
    double dev = deviation(cs, stats.mean, stats.stddev);
    if (!(dev <= tau)) return;
    bool term_is_parent = false;
    if (down) {
      double as_child = cos_vec(uv - cv, *down);
      double dev_child = deviation(as_child, stats.dir_mean, stats.dir_stddev);
      double dev_parent = deviation(-as_child, stats.dir_mean, stats.dir_stddev);
      term_is_parent = dev_parent < dev_child;
    }
    out.push_back(term_is_parent ? ProposedLink{u, c, cs, dev} : ProposedLink{c, u, cs, dev});
  };
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (auto& [c, cv] : classes) consider(terms[i].first, terms[i].second, c, cv);
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      consider(terms[i].first, terms[i].second, terms[j].first, terms[j].second);
  }
  std::sort(out.begin(), out.end(), [](const ProposedLink& a, const ProposedLink& b) {
    if (a.deviation != b.deviation) return a.deviation < b.deviation;
    return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
  });
  return out;
}

std::string added_entity_iri(std::string_view term) { return fmt::format("urn:reqplumb:term:{}", slug(term)); }

CompletedModel restructure(const DomainModel& base, const std::vector<ProposedLink>& proposals,
                           const std::vector<std::string>& considered) {
  auto is_term = [](const std::string& key) { return key.starts_with("term:"); };
  auto term_of = [](const std::string& key) { return key.substr(5); };

  CompletedModel cm;
  cm.considered_terms.insert(considered.begin(), considered.end());
  for (auto& t : base.triples()) cm.base_hierarchy_links += base.is_hierarchy(t);

  std::set<std::pair<std::string, std::string>> edges;
  for (auto& p : proposals) {
    if (p.parent == p.child) continue;
    if (!is_term(p.parent) && !is_term(p.child)) continue;
    edges.emplace(p.parent, p.child);
  }
  // Re -> De, De -> Re' and Re -> Re' together: drop De -> Re' so the flip
  // below yields De -> Re -> Re'.
  std::set<std::pair<std::string, std::string>> drop;
  for (auto& [re, de] : edges) {
    if (!is_term(re) || is_term(de)) continue;
    for (auto& [de2, re2] : edges)
      if (de2 == de && is_term(re2) && edges.count({re, re2})) drop.emplace(de, re2);
  }
  std::map<std::pair<std::string, std::string>, double> kept;
  for (auto& p : proposals) {
    std::pair e{p.parent, p.child};
    if (!edges.count(e) || drop.count(e)) continue;
    // Every added term sits below the model entity it relates to.
    if (is_term(p.parent) && !is_term(p.child)) std::swap(e.first, e.second);
    auto [it, inserted] = kept.emplace(e, p.deviation);
    if (!inserted) it->second = std::min(it->second, p.deviation);
  }

  std::vector<std::pair<double, std::pair<std::string, std::string>>> ordered;
  for (auto& [e, dev] : kept) ordered.push_back({dev, e});
  std::sort(ordered.begin(), ordered.end());

  std::map<std::string, std::vector<std::string>> term_children;
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::deque<std::string> q{from};
    while (!q.empty()) {
      auto cur = q.front();
      q.pop_front();
      if (cur == to) return true;
      for (auto& n : term_children[cur])
        if (seen.insert(n).second) q.push_back(n);
    }
    return false;
  };
  std::vector<std::pair<std::string, std::string>> accepted;
  for (auto& [dev, e] : ordered) {
    auto& [parent, child] = e;
    if (is_term(parent) && reaches(child, parent)) {
      cm.warnings.push_back(fmt::format("dropped link {} -> {}: it would close a cycle", term_of(parent), term_of(child)));
      continue;
    }
    if (is_term(parent)) term_children[parent].push_back(child);
    accepted.push_back(e);
  }

  // Terms reachable from an original entity become model entities.
  std::set<std::string> added;
  std::deque<std::string> q;
  for (auto& [parent, child] : accepted)
    if (!is_term(parent) && added.insert(child).second) q.push_back(child);
  while (!q.empty()) {
    auto cur = q.front();
    q.pop_front();
    for (auto& n : term_children[cur])
      if (added.insert(n).second) q.push_back(n);
  }

  cm.model = base;
  std::string pred_iri;
  auto hp = dominant_hierarchy_predicate(base, &pred_iri);
  auto iri_of = [&](const std::string& key) {
    return is_term(key) ? added_entity_iri(term_of(key)) : key.substr(7);
  };
  for (auto& key : added) {
    auto term = term_of(key);
    auto iri = added_entity_iri(term);
    if (base.find(iri)) continue;
    cm.model.put_entity({iri, term, Category::Classes});
    cm.added[term] = iri;
  }
  for (auto& [parent, child] : accepted) {
    if (!added.count(child) || (is_term(parent) && !added.count(parent))) continue;
    auto p = iri_of(parent), c = iri_of(child);
    FactTriple t = hp.child_to_parent ? FactTriple{c, pred_iri, p} : FactTriple{p, pred_iri, c};
    cm.model.add_triple(t);
    cm.added_links.push_back(t);
  }
  std::sort(cm.added_links.begin(), cm.added_links.end());
  for (auto& t : considered)
    if (!cm.added.count(t)) cm.unadded.push_back(t);
  std::sort(cm.unadded.begin(), cm.unadded.end());
  cm.unadded.erase(std::unique(cm.unadded.begin(), cm.unadded.end()), cm.unadded.end());
  cm.tree = build_hierarchy(cm.model);
  return cm;
}

CompletedModel complete_model(const DomainModel& base, const EmbeddingSpace& space, const MappingSet& mapping,
                              const std::vector<std::string>& vocabulary, const CompletionOptions& opts,
                              const std::set<std::string>& previously_considered) {
  auto mapped = mapping.mapped_term_set();
  std::set<std::string> labels;
  for (auto& e : base.entities())
    if (e.category == Category::Classes) labels.insert(e.label);
  std::vector<std::string> unmapped;
  for (auto& t : vocabulary)
    if (!mapped.count(t) && !labels.count(t) && !previously_considered.count(t)) unmapped.push_back(t);
  std::sort(unmapped.begin(), unmapped.end());
  unmapped.erase(std::unique(unmapped.begin(), unmapped.end()), unmapped.end());

  std::vector<ProposedLink> proposals;
  if (!unmapped.empty()) {
    auto stats = reference_cosine_stats(space, build_hierarchy(base), base);
    proposals = propose_links(unmapped, space, base, stats, opts.tau);
  }
  auto cm = restructure(base, proposals, unmapped);
  cm.considered_terms.insert(previously_considered.begin(), previously_considered.end());
  return cm;
}

CompletionReport completion_report(const CompletedModel& cm, const DomainModel& base, const std::vector<std::string>& rt,
                                   const std::vector<SynonymPair>& accepted) {
  CompletionReport r;
  r.added_entities = cm.added.size();
  r.added_links = cm.added_links.size();
  for (auto& t : cm.model.triples()) r.total_hierarchy_links += cm.model.is_hierarchy(t);
  if (!rt.empty()) {
    auto before = build_mapping(rt, base, accepted);
    auto after = build_mapping(rt, cm.model, accepted);
    r.rt_size = before.rt_size;
    r.mapped_before = before.mapped_terms;
    r.mapped_after = after.mapped_terms;
    r.rate_before = before.rate;
    r.rate_after = after.rate;
  }
  return r;
}

nlohmann::json to_json(const CompletedModel& cm) {
  nlohmann::json links = nlohmann::json::array();
  for (auto& t : cm.added_links) links.push_back({{"h", t.h}, {"r", t.r}, {"t", t.t}});
  return {{"schema", kSchemaVersion},
          {"base_hierarchy_links", cm.base_hierarchy_links},
          {"added", cm.added},
          {"added_links", links},
          {"considered_terms", cm.considered_terms},
          {"unadded", cm.unadded},
          {"warnings", cm.warnings},
          {"model", to_json(cm.model)}};
}

CompletedModel completed_model_from_json(const nlohmann::json& j) {
  CompletedModel cm;
  cm.model = model_from_json(j.at("model"));
  cm.added = j.at("added").get<std::map<std::string, std::string>>();
  for (auto& t : j.at("added_links")) cm.added_links.push_back({t.at("h"), t.at("r"), t.at("t")});
  cm.considered_terms = j.at("considered_terms").get<std::set<std::string>>();
  cm.unadded = j.value("unadded", std::vector<std::string>{});
  cm.warnings = j.value("warnings", std::vector<std::string>{});
  cm.base_hierarchy_links = j.value("base_hierarchy_links", std::size_t{0});
  cm.tree = build_hierarchy(cm.model);
  return cm;
}

nlohmann::json to_json(const CompletionReport& r) {
  return {{"schema", kSchemaVersion},
          {"added_entities", r.added_entities},
          {"added_hierarchy_links", r.added_links},
          {"total_hierarchy_links", r.total_hierarchy_links},
          {"rt_size", r.rt_size},
          {"mapped_before", r.mapped_before},
          {"mapped_after", r.mapped_after},
          {"rate_before", r.rate_before},
          {"rate_after", r.rate_after}};
}

nlohmann::json to_json(const CosineStats& s) {
  return {{"mean", s.mean},   {"stddev", s.stddev},         {"pairs", s.pairs},
          {"has_direction", s.has_direction}, {"dir_mean", s.dir_mean}, {"dir_stddev", s.dir_stddev}};
}

}  // namespace reqplumb
