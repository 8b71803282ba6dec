#include "reqplumb/recommend.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::None: return "none";
    case Strategy::EntityType: return "entity-type";
    case Strategy::NodeType: return "node-type";
    case Strategy::FamilyBelonging: return "family";
    case Strategy::Combination: return "combination";
  }
  return "none";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto st : kAllStrategies)
    if (to_string(st) == s) return st;
  return std::nullopt;
}

Recommendation recommend(const DomainModel& model, const HierarchyTree& tree, const std::set<std::string>& mapped,
                         Strategy strategy, const FamilySelection* families) {
  if ((strategy == Strategy::FamilyBelonging || strategy == Strategy::Combination) && !families)
    throw Error(fmt::format("strategy '{}' needs a family selection (run: analyze)", to_string(strategy)));
  auto is_class = [](const Entity& e) { return e.category == Category::Classes; };
  auto is_leaf = [&](const Entity& e) {
    auto it = tree.position.find(e.iri);
    return it != tree.position.end() && it->second == NodePosition::Leaf;
  };
  auto in_family = [&](const Entity& e) { return families->scope.count(e.iri) != 0; };

  std::vector<const Entity*> picked;
  for (auto& e : model.entities()) {
    if (mapped.count(e.iri)) continue;
    bool keep = true;
    switch (strategy) {
      case Strategy::None: break;
      case Strategy::EntityType: keep = is_class(e); break;
      case Strategy::NodeType: keep = is_class(e) && is_leaf(e); break;
      case Strategy::FamilyBelonging: keep = in_family(e); break;
      case Strategy::Combination: keep = is_class(e) && is_leaf(e) && in_family(e); break;
    }
    if (keep) picked.push_back(&e);
  }
  std::sort(picked.begin(), picked.end(), [](const Entity* a, const Entity* b) {
    return std::tie(a->label, a->iri) < std::tie(b->label, b->iri);
  });
  Recommendation r;
  r.strategy = strategy;
  for (auto* e : picked) r.entities.push_back(e->iri);
  return r;
}

double f2_score(double precision, double recall) {
  double denom = 4 * precision + recall;
  return denom > 0 ? 5 * precision * recall / denom : 0.0;
}

GoldMatcher::GoldMatcher(std::vector<std::string> gold, const std::vector<SynonymPair>& accepted) {
  for (auto& g : gold) gold_set_.insert(normalize_label(g));
  gold_.assign(gold_set_.begin(), gold_set_.end());
  for (auto& p : accepted) {
    auto a = normalize_label(p.a), b = normalize_label(p.b);
    syn_[a].insert(b);
    syn_[b].insert(a);
  }
}

std::vector<std::string> GoldMatcher::hits(const std::string& label) const {
  std::set<std::string> out;
  auto norm = normalize_label(label);
  if (gold_set_.count(norm)) out.insert(norm);
  if (auto it = syn_.find(norm); it != syn_.end())
    for (auto& s : it->second)
      if (gold_set_.count(s)) out.insert(s);
  return {out.begin(), out.end()};
}

namespace {

Metrics score(const std::vector<std::string>& entities, const DomainModel& model, const GoldMatcher& gold,
              const std::vector<std::string>& gold_universe) {
  Metrics m;
  m.gold = gold_universe.size();
  m.recommended = entities.size();
  std::set<std::string> universe(gold_universe.begin(), gold_universe.end());
  std::set<std::string> hit_gold;
  for (auto& iri : entities) {
    auto* e = model.find(iri);
    if (!e) continue;
    bool any = false;
    for (auto& g : gold.hits(e->label))
      if (universe.count(g)) {
        hit_gold.insert(g);
        any = true;
      }
    m.recommended_hit += any;
  }
  m.gold_hit = hit_gold.size();
  m.recall = m.gold ? static_cast<double>(m.gold_hit) / static_cast<double>(m.gold) : 0.0;
  m.precision = m.recommended ? static_cast<double>(m.recommended_hit) / static_cast<double>(m.recommended) : 0.0;
  m.f2 = f2_score(m.precision, m.recall);
  return m;
}

}  // namespace

Metrics evaluate(const Recommendation& rec, const DomainModel& model, const GoldMatcher& gold) {
  if (gold.gold().empty()) throw Error("cannot evaluate against an empty gold set");
  return score(rec.entities, model, gold, gold.gold());
}

std::vector<FamilyBreakdown> family_breakdown(const DomainModel& model, const HierarchyTree& tree,
                                              const std::set<std::string>& mapped, const FamilySelection& families,
                                              const GoldMatcher& gold) {
  std::vector<FamilyBreakdown> out;
  for (auto& root : families.roots) {
    FamilyBreakdown fb;
    fb.root = root.node;
    fb.label = root.label;
    std::vector<std::string> members{root.node};
    for (auto& d : tree.descendants(root.node)) members.push_back(d);
    std::vector<std::string> recommended;
    std::set<std::string> reachable;
    for (auto& iri : members) {
      if (mapped.count(iri)) continue;
      recommended.push_back(iri);
      if (auto* e = model.find(iri))
        for (auto& g : gold.hits(e->label)) reachable.insert(g);
    }
    std::vector<std::string> universe(reachable.begin(), reachable.end());
    fb.metrics = score(recommended, model, gold, universe);
    fb.should_have = universe.size();
    fb.actually = fb.metrics.gold_hit;
    out.push_back(std::move(fb));
  }
  return out;
}

std::vector<std::string> gold_terms(const std::vector<std::string>& holdout_terms,
                                    const std::vector<std::string>& known_terms,
                                    const std::vector<SynonymPair>& accepted, const DomainModel& model,
                                    const std::set<std::string>& mapped_entities) {
  std::set<std::string> known;
  for (auto& k : known_terms) known.insert(normalize_label(k));
  std::set<std::string> mapped_labels;
  for (auto& iri : mapped_entities)
    if (auto* e = model.find(iri)) mapped_labels.insert(e->label);
  std::map<std::string, std::set<std::string>> syn;
  for (auto& p : accepted) {
    auto a = normalize_label(p.a), b = normalize_label(p.b);
    syn[a].insert(b);
    syn[b].insert(a);
  }
  auto related = [&](const std::string& t, const std::set<std::string>& targets) {
    if (targets.count(t)) return true;
    if (auto it = syn.find(t); it != syn.end())
      for (auto& s : it->second)
        if (targets.count(s)) return true;
    return false;
  };
  std::set<std::string> out;
  for (auto& h : holdout_terms) {
    auto t = normalize_label(h);
    if (related(t, known) || related(t, mapped_labels)) continue;
    out.insert(t);
  }
  return {out.begin(), out.end()};
}

nlohmann::json to_json(const Recommendation& r, const DomainModel& model) {
  nlohmann::json ents = nlohmann::json::array();
  for (auto& iri : r.entities) {
    auto* e = model.find(iri);
    ents.push_back({{"iri", iri}, {"label", e ? e->label : iri}});
  }
  return {{"schema", kSchemaVersion}, {"strategy", to_string(r.strategy)}, {"count", r.entities.size()}, {"entities", ents}};
}

nlohmann::json to_json(const Metrics& m) {
  return {{"recall", m.recall},
          {"precision", m.precision},
          {"f2", m.f2},
          {"gold", m.gold},
          {"gold_hit", m.gold_hit},
          {"recommended", m.recommended},
          {"recommended_hit", m.recommended_hit}};
}

}  // namespace reqplumb
