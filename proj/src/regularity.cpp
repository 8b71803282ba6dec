#include "reqplumb/regularity.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

namespace {

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

double EntityTypeDistribution::fraction(Category c) const {
  auto it = counts.find(c);
  return ratio(it == counts.end() ? 0 : it->second, total);
}

EntityTypeDistribution entity_type_distribution(const MappingSet& mapping, const DomainModel& model) {
  EntityTypeDistribution d;
  for (auto& iri : mapping.mapped_entities()) {
    auto* e = model.find(iri);
    ++d.counts[e ? e->category : Category::Other];
    ++d.total;
  }
  if (d.total == 0) d.warnings.push_back("no mapped entities; entity type distribution is empty");
  return d;
}

double PositionDistribution::leaf_fraction() const { return ratio(leaf, tracked()); }

PositionDistribution node_position_distribution(const std::set<std::string>& mapped, const HierarchyTree& tree) {
  PositionDistribution d;
  for (auto& n : mapped) {
    auto it = tree.position.find(n);
    if (it == tree.position.end()) {
      ++d.untracked;
      continue;
    }
    switch (it->second) {
      case NodePosition::Root: ++d.root; break;
      case NodePosition::Intermediate: ++d.intermediate; break;
      case NodePosition::Leaf: ++d.leaf; break;
    }
  }
  return d;
}

double ahme(const HierarchyTree& tree, const std::set<std::string>& mapped, const std::string& node) {
  if (mapped.empty()) throw Error("AHME is undefined without mapped entities");
  auto lv = tree.level.find(node);
  if (lv == tree.level.end()) throw Error(fmt::format("AHME: {} is not in the hierarchy", node));
  std::size_t med = 0;
  for (auto& d : tree.descendants(node)) med += mapped.count(d);
  return ratio(med, mapped.size()) * lv->second;
}

FamilyRule parse_family_rule(std::string_view s) {
  static const std::regex re(R"(\s*(top_k|relative)\s*\(\s*([0-9.eE+-]+)\s*\)\s*)");
  std::string str(s);
  std::smatch m;
  if (!std::regex_match(str, m, re))
    throw Error(fmt::format("family rule must be top_k(<k>) or relative(<alpha>), got '{}'", s));
  FamilyRule r;
  if (m[1] == "top_k") {
    r.kind = FamilyRule::Kind::TopK;
    long k = std::stol(m[2]);
    if (k < 1) throw Error("top_k needs k >= 1");
    r.k = static_cast<std::size_t>(k);
  } else {
    r.kind = FamilyRule::Kind::Relative;
    r.alpha = std::stod(m[2]);
    if (r.alpha <= 0 || r.alpha > 1) throw Error("relative needs 0 < alpha <= 1");
  }
  return r;
}

std::string to_string(const FamilyRule& r) {
  return r.kind == FamilyRule::Kind::TopK ? fmt::format("top_k({})", r.k) : fmt::format("relative({})", r.alpha);
}

double FamilySelection::scope_fraction() const { return ratio(scope.size(), classes_total); }

FamilySelection select_families(const HierarchyTree& tree, const DomainModel& model, const std::set<std::string>& mapped,
                                const FamilyRule& rule) {
  FamilySelection sel;
  sel.rule = rule;
  sel.classes_total = tree.size();
  if (mapped.empty()) return sel;
  for (auto& [node, level] : tree.level) {
    FamilyRoot r;
    r.node = node;
    auto* e = model.find(node);
    r.label = e ? e->label : node;
    r.level = level;
    for (auto& d : tree.descendants(node)) r.mapped_descendants += mapped.count(d);
    r.ahme = ratio(r.mapped_descendants, mapped.size()) * level;
    if (r.ahme > 0) sel.ranking.push_back(std::move(r));
  }
  std::sort(sel.ranking.begin(), sel.ranking.end(), [](const FamilyRoot& a, const FamilyRoot& b) {
    if (a.ahme != b.ahme) return a.ahme > b.ahme;
    if (a.label != b.label) return a.label < b.label;
    return a.node < b.node;
  });
  if (sel.ranking.empty()) return sel;
  if (rule.kind == FamilyRule::Kind::TopK) {
    for (std::size_t i = 0; i < std::min(rule.k, sel.ranking.size()); ++i) sel.roots.push_back(sel.ranking[i]);
  } else {
    double cutoff = rule.alpha * sel.ranking.front().ahme;
    for (auto& r : sel.ranking)
      if (r.ahme >= cutoff - 1e-12) sel.roots.push_back(r);
  }
  for (auto& r : sel.roots) {
    sel.scope.insert(r.node);
    for (auto& d : tree.descendants(r.node)) sel.scope.insert(d);
  }
  return sel;
}

double RequirementSideStats::mapped_fraction() const { return ratio(with_mapped, requirements); }
double RequirementSideStats::two_plus_fraction() const { return ratio(with_two_plus, with_mapped); }
double RequirementSideStats::juxtaposition_fraction() const { return ratio(with_juxtaposition, with_mapped); }

RequirementSideStats requirement_side_stats(const RequirementSet& known, const MappingSet& mapping) {
  std::map<std::vector<std::string>, std::string> terms;
  std::size_t longest = 1;
  for (auto& t : mapping.mapped_term_set()) {
    auto words = split_ws(t);
    longest = std::max(longest, words.size());
    terms.emplace(std::move(words), t);
  }
  RequirementSideStats s;
  s.requirements = known.size();
  for (auto& req : known.requirements) {
    auto& toks = req.tokens;
    std::set<std::string> found;
    // (start, end) token spans of matched terms in order.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    while (i < toks.size()) {
      std::size_t matched = 0;
      for (std::size_t len = std::min(longest, toks.size() - i); len >= 1 && !terms.empty(); --len) {
        std::vector<std::string> words;
        for (std::size_t k = i; k < i + len; ++k) words.push_back(toks[k].norm);
        if (auto it = terms.find(words); it != terms.end()) {
          found.insert(it->second);
          spans.emplace_back(i, i + len);
          matched = len;
          break;
        }
      }
      i += matched ? matched : 1;
    }
    if (found.empty()) continue;
    ++s.with_mapped;
    if (found.size() >= 2) ++s.with_two_plus;
    for (std::size_t k = 0; k + 1 < spans.size(); ++k) {
      auto gap = spans[k].second;
      if (spans[k + 1].first == gap + 1 && toks[gap].pos == Pos::Conj) {
        ++s.with_juxtaposition;
        break;
      }
    }
  }
  return s;
}

nlohmann::json to_json(const EntityTypeDistribution& d) {
  nlohmann::json cats = nlohmann::json::object();
  for (auto& [c, n] : d.counts) cats[std::string(to_string(c))] = {{"count", n}, {"fraction", d.fraction(c)}};
  return {{"total", d.total}, {"categories", cats}, {"warnings", d.warnings}};
}

nlohmann::json to_json(const PositionDistribution& d) {
  return {{"Root", d.root},
          {"Intermediate", d.intermediate},
          {"Leaf", d.leaf},
          {"untracked", d.untracked},
          {"leaf_fraction", d.leaf_fraction()}};
}

namespace {

nlohmann::json root_json(const FamilyRoot& r) {
  return {{"node", r.node}, {"label", r.label}, {"ahme", r.ahme}, {"level", r.level}, {"mapped_descendants", r.mapped_descendants}};
}

FamilyRoot root_from_json(const nlohmann::json& j) {
  return {j.at("node"), j.at("label"), j.at("ahme"), j.at("level"), j.at("mapped_descendants")};
}

}  // namespace

nlohmann::json to_json(const FamilySelection& f) {
  nlohmann::json roots = nlohmann::json::array(), ranking = nlohmann::json::array();
  for (auto& r : f.roots) roots.push_back(root_json(r));
  for (auto& r : f.ranking) ranking.push_back(root_json(r));
  return {{"schema", kSchemaVersion},
          {"rule", to_string(f.rule)},
          {"roots", roots},
          {"scope", f.scope},
          {"scope_size", f.scope.size()},
          {"classes_total", f.classes_total},
          {"scope_fraction", f.scope_fraction()},
          {"ranking", ranking}};
}

FamilySelection families_from_json(const nlohmann::json& j) {
  FamilySelection f;
  f.rule = parse_family_rule(j.at("rule").get<std::string>());
  for (auto& r : j.at("roots")) f.roots.push_back(root_from_json(r));
  for (auto& r : j.at("ranking")) f.ranking.push_back(root_from_json(r));
  f.scope = j.at("scope").get<std::set<std::string>>();
  f.classes_total = j.at("classes_total").get<std::size_t>();
  return f;
}

nlohmann::json to_json(const RequirementSideStats& s) {
  return {{"requirements", s.requirements},
          {"with_mapped", s.with_mapped},
          {"with_two_plus", s.with_two_plus},
          {"with_juxtaposition", s.with_juxtaposition},
          {"mapped_fraction", s.mapped_fraction()},
          {"two_plus_fraction", s.two_plus_fraction()},
          {"juxtaposition_fraction", s.juxtaposition_fraction()}};
}

}  // namespace reqplumb
