#include "reqplumb/mapping.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

std::string_view to_string(MappingKind k) { return k == MappingKind::Direct ? "Direct" : "Synonym"; }

std::set<std::string> MappingSet::mapped_entities() const {
  std::set<std::string> out;
  for (auto& p : pairs) out.insert(p.entity);
  return out;
}

std::set<std::string> MappingSet::mapped_term_set() const {
  std::set<std::string> out;
  for (auto& p : pairs) out.insert(p.term);
  return out;
}

std::vector<std::string> MappingSet::entities_for(std::string_view term) const {
  std::set<std::string> out;
  for (auto& p : pairs)
    if (p.term == term) out.insert(p.entity);
  return {out.begin(), out.end()};
}

std::vector<std::string> MappingSet::terms_for(std::string_view entity) const {
  std::set<std::string> out;
  for (auto& p : pairs)
    if (p.entity == entity) out.insert(p.term);
  return {out.begin(), out.end()};
}

MappingSet build_mapping(const std::vector<std::string>& rt, const DomainModel& model,
                         const std::vector<SynonymPair>& accepted, std::optional<Category> restrict_to) {
  if (rt.empty()) throw Error("cannot build a mapping without requirement terms");
  std::multimap<std::string, const Entity*> by_label;
  for (auto& e : model.entities())
    if (!restrict_to || e.category == *restrict_to) by_label.emplace(e.label, &e);

  std::set<std::string> terms;
  for (auto& t : rt) terms.insert(normalize_label(t));

  std::set<MappingPair> pairs;
  for (auto& t : terms) {
    auto [lo, hi] = by_label.equal_range(t);
    for (auto it = lo; it != hi; ++it) pairs.insert({t, it->second->iri, it->second->label, MappingKind::Direct});
  }
  for (auto& s : accepted) {
    // Either side may be the requirement term.
    for (auto [term, label] : {std::pair{s.a, s.b}, std::pair{s.b, s.a}}) {
      auto nt = normalize_label(term);
      if (!terms.count(nt)) continue;
      auto [lo, hi] = by_label.equal_range(normalize_label(label));
      for (auto it = lo; it != hi; ++it) {
        MappingPair direct{nt, it->second->iri, it->second->label, MappingKind::Direct};
        if (pairs.count(direct)) continue;
        pairs.insert({nt, it->second->iri, it->second->label, MappingKind::Synonym});
      }
    }
  }

  MappingSet m;
  m.pairs.assign(pairs.begin(), pairs.end());
  m.rt_size = terms.size();
  m.mapped_terms = m.mapped_term_set().size();
  m.rate = static_cast<double>(m.mapped_terms) / static_cast<double>(m.rt_size);
  m.restrict_to = restrict_to;
  return m;
}

std::vector<MethodRow> compare_mapping_methods(const RequirementSet& known, const StopWords& stopwords,
                                               const TermSet& cvalue_terms, const DomainModel& model,
                                               const std::vector<SynonymPair>& accepted,
                                               std::optional<Category> restrict_to) {
  std::vector<MethodRow> rows;
  auto row = [&](std::string name, const std::vector<std::string>& terms, const std::vector<SynonymPair>& syn) {
    MethodRow r{std::move(name), 0, 0, 0.0};
    if (!terms.empty()) {
      auto m = build_mapping(terms, model, syn, restrict_to);
      r.terms = m.rt_size;
      r.mapped = m.mapped_terms;
      r.rate = m.rate;
    }
    rows.push_back(std::move(r));
  };
  row("NNs/NPs", noun_phrases(known, stopwords), {});
  row("C-Value", cvalue_terms.labels(), {});
  row("C-Value+Synonym", cvalue_terms.labels(), accepted);
  return rows;
}

nlohmann::json to_json(const MappingSet& m) {
  nlohmann::json pairs = nlohmann::json::array();
  std::size_t direct = 0;
  for (auto& p : m.pairs) {
    pairs.push_back({{"term", p.term}, {"entity", p.entity}, {"label", p.label}, {"kind", to_string(p.kind)}});
    direct += p.kind == MappingKind::Direct;
  }
  return {{"schema", kSchemaVersion},
          {"restrict", m.restrict_to ? nlohmann::json(to_string(*m.restrict_to)) : nlohmann::json(nullptr)},
          {"rt_size", m.rt_size},
          {"mapped_terms", m.mapped_terms},
          {"mapped_entities", m.mapped_entities().size()},
          {"direct_pairs", direct},
          {"synonym_pairs", m.pairs.size() - direct},
          {"rate", m.rate},
          {"pairs", pairs}};
}

MappingSet mapping_from_json(const nlohmann::json& j) {
  MappingSet m;
  for (auto& p : j.at("pairs"))
    m.pairs.push_back({p.at("term"), p.at("entity"), p.at("label"),
                       p.at("kind").get<std::string>() == "Direct" ? MappingKind::Direct : MappingKind::Synonym});
  std::sort(m.pairs.begin(), m.pairs.end());
  m.rt_size = j.at("rt_size").get<std::size_t>();
  m.mapped_terms = j.at("mapped_terms").get<std::size_t>();
  m.rate = j.at("rate").get<double>();
  if (!j.at("restrict").is_null()) m.restrict_to = parse_category(j.at("restrict").get<std::string>());
  return m;
}

nlohmann::json to_json(const std::vector<MethodRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& r : rows) arr.push_back({{"method", r.method}, {"terms", r.terms}, {"mapped", r.mapped}, {"rate", r.rate}});
  return {{"schema", kSchemaVersion}, {"methods", arr}};
}

}  // namespace reqplumb
