#include "reqplumb/domain_model.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

namespace {

constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::Classes, "Classes"},
    {Category::ObjectProperty, "ObjectProperty"},
    {Category::DataProperty, "DataProperty"},
    {Category::NamedIndividual, "NamedIndividual"},
    {Category::AnnotationProperty, "AnnotationProperty"},
    {Category::Other, "Other"},
};

bool is_vocabulary(std::string_view iri) {
  for (auto ns : {rdf::vocab::kRdf, rdf::vocab::kRdfs, rdf::vocab::kOwl, rdf::vocab::kXsd})
    if (iri.substr(0, ns.size()) == ns) return true;
  return false;
}

// Category for an rdf:type object in the OWL/RDFS vocabulary.
std::optional<Category> category_for_type(std::string_view type_iri) {
  using namespace rdf::vocab;
  auto is = [&](std::string_view ns, std::string_view local) {
    return type_iri.size() == ns.size() + local.size() && type_iri.substr(0, ns.size()) == ns &&
           type_iri.substr(ns.size()) == local;
  };
  if (is(kOwl, "Class") || is(kRdfs, "Class")) return Category::Classes;
  if (is(kOwl, "ObjectProperty")) return Category::ObjectProperty;
  if (is(kOwl, "DatatypeProperty")) return Category::DataProperty;
  if (is(kOwl, "NamedIndividual")) return Category::NamedIndividual;
  if (is(kOwl, "AnnotationProperty")) return Category::AnnotationProperty;
  if (is_vocabulary(type_iri)) return Category::Other;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Category c) {
  for (auto& [cat, name] : kCategoryNames)
    if (cat == c) return name;
  return "Other";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto& [cat, name] : kCategoryNames)
    if (name == s) return cat;
  return std::nullopt;
}

std::string_view to_string(NodePosition p) {
  switch (p) {
    case NodePosition::Root: return "Root";
    case NodePosition::Intermediate: return "Intermediate";
    case NodePosition::Leaf: return "Leaf";
  }
  return "Leaf";
}

bool HierarchyPredicate::matches(std::string_view predicate_iri) const {
  if (rdf::expand_well_known(name) == predicate_iri) return true;
  return name.find(':') == std::string::npos && rdf::local_name(predicate_iri) == name;
}

std::vector<HierarchyPredicate> default_hierarchy_predicates() {
  return {{"rdfs:subClassOf", true}, {"hasSubClasses", false}};
}

HierarchyPredicate parse_hierarchy_predicate(std::string_view spec) {
  auto eq = spec.find('=');
  std::string name(trim(spec.substr(0, eq)));
  if (name.empty()) throw Error(fmt::format("empty hierarchy predicate in '{}'", spec));
  if (eq == std::string_view::npos)
    return {name, name.find("hasSub") == std::string::npos};
  auto dir = trim(spec.substr(eq + 1));
  if (dir == "child-to-parent") return {name, true};
  if (dir == "parent-to-child") return {name, false};
  throw Error(fmt::format("hierarchy predicate direction must be child-to-parent or parent-to-child, got '{}'", dir));
}

const Entity* DomainModel::find(std::string_view iri) const {
  auto it = index_.find(std::string(iri));
  return it == index_.end() ? nullptr : &entities_[it->second];
}

void DomainModel::put_entity(Entity e) {
  auto it = index_.find(e.iri);
  if (it != index_.end()) {
    entities_[it->second] = std::move(e);
    return;
  }
  // Keep IRI order so serialization is canonical.
  auto pos = std::lower_bound(entities_.begin(), entities_.end(), e.iri,
                              [](const Entity& a, const std::string& iri) { return a.iri < iri; });
  auto at = static_cast<std::size_t>(pos - entities_.begin());
  entities_.insert(pos, std::move(e));
  index_.clear();
  for (std::size_t i = 0; i < entities_.size(); ++i) index_[entities_[i].iri] = i;
  (void)at;
}

void DomainModel::add_triple(FactTriple t) {
  if (!find(t.h) || !find(t.t))
    throw Error(fmt::format("triple ({}, {}, {}) references an unknown entity", t.h, t.r, t.t));
  if (triple_set_.emplace(t, true).second) {
    auto pos = std::lower_bound(triples_.begin(), triples_.end(), t);
    triples_.insert(pos, std::move(t));
  }
}

std::optional<HierarchyPredicate> DomainModel::hierarchy_predicate_for(std::string_view predicate) const {
  for (auto& hp : hierarchy_predicates)
    if (hp.matches(predicate)) return hp;
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> DomainModel::hierarchy_edges() const {
  std::vector<std::pair<std::string, std::string>> edges;
  for (auto& t : triples_) {
    auto hp = hierarchy_predicate_for(t.r);
    if (!hp) continue;
    if (hp->child_to_parent) edges.emplace_back(t.t, t.h);
    else edges.emplace_back(t.h, t.t);
  }
  return edges;
}

std::size_t DomainModel::relation_type_count() const {
  std::set<std::string_view> rel;
  for (auto& t : triples_) rel.insert(t.r);
  return rel.size();
}

DomainModel build_model(const std::vector<rdf::Statement>& statements,
                        std::vector<HierarchyPredicate> predicates) {
  DomainModel model;
  model.hierarchy_predicates = std::move(predicates);

  std::map<std::string, Category> category;
  std::map<std::string, std::string> labels;
  std::set<std::string> iris;
  std::vector<const rdf::Statement*> relational;

  auto category_rank = [](Category c) { return static_cast<int>(c); };

  for (auto& st : statements) {
    bool subject_blank = st.subject.kind == rdf::TermKind::Blank;
    if (st.predicate == rdf::vocab::kType && st.object.kind == rdf::TermKind::Iri) {
      if (auto cat = category_for_type(st.object.value)) {
        ++model.counts.type_statements;
        if (subject_blank) continue;
        auto [it, inserted] = category.emplace(st.subject.value, *cat);
        if (!inserted && category_rank(*cat) < category_rank(it->second)) it->second = *cat;
        iris.insert(st.subject.value);
        continue;
      }
    }
    if (st.object.kind == rdf::TermKind::Literal) {
      ++model.counts.literal_statements;
      if (st.predicate == rdf::vocab::kLabel && !subject_blank) {
        auto& slot = labels[st.subject.value];
        if (slot.empty() || st.object.lang == "en") slot = st.object.value;
      }
      continue;
    }
    if (subject_blank || st.object.kind == rdf::TermKind::Blank) {
      ++model.counts.blank_node_statements;
      continue;
    }
    if (is_vocabulary(st.subject.value) || is_vocabulary(st.object.value)) {
      ++model.counts.vocabulary_statements;
      continue;
    }
    relational.push_back(&st);
    iris.insert(st.subject.value);
    iris.insert(st.object.value);
  }

  // Hierarchy endpoints without an explicit type are classes by the range of
  // the hierarchy predicate.
  for (auto* st : relational) {
    bool hierarchy = std::any_of(model.hierarchy_predicates.begin(), model.hierarchy_predicates.end(),
                                 [&](auto& hp) { return hp.matches(st->predicate); });
    if (!hierarchy) continue;
    category.emplace(st->subject.value, Category::Classes);
    category.emplace(st->object.value, Category::Classes);
  }

  for (auto& iri : iris) {
    if (is_vocabulary(iri)) continue;
    Entity e;
    e.iri = iri;
    auto lab = labels.find(iri);
    e.label = normalize_label(lab != labels.end() ? lab->second : rdf::local_name(iri));
    if (e.label.empty()) e.label = normalize_word(rdf::local_name(iri));
    if (e.label.empty()) e.label = iri;
    auto cat = category.find(iri);
    e.category = cat == category.end() ? Category::Other : cat->second;
    model.put_entity(std::move(e));
  }

  for (auto* st : relational) {
    if (st->subject.value == st->object.value) {
      bool hierarchy = std::any_of(model.hierarchy_predicates.begin(), model.hierarchy_predicates.end(),
                                   [&](auto& hp) { return hp.matches(st->predicate); });
      if (hierarchy) {
        model.warnings.push_back(fmt::format("dropped self-parenting triple on {}", st->subject.value));
        continue;
      }
    }
    model.add_triple({st->subject.value, st->predicate, st->object.value});
  }
  return model;
}

DomainModel parse_rdf(const std::filesystem::path& path, rdf::Syntax syntax,
                      std::vector<HierarchyPredicate> predicates) {
  return build_model(rdf::parse_file(path, syntax), std::move(predicates));
}

std::vector<Entity> classes_of(const DomainModel& model, std::vector<std::string>* warnings) {
  std::vector<Entity> out;
  for (auto& e : model.entities())
    if (e.category == Category::Classes) out.push_back(e);
  if (out.empty() && warnings) warnings->push_back("domain model has no Classes entities");
  return out;
}

std::vector<std::string> HierarchyTree::descendants(std::string_view node) const {
  std::vector<std::string> out;
  std::deque<std::string> queue{std::string(node)};
  while (!queue.empty()) {
    auto cur = std::move(queue.front());
    queue.pop_front();
    auto it = children.find(cur);
    if (it == children.end()) continue;
    for (auto& c : it->second) {
      out.push_back(c);
      queue.push_back(c);
    }
  }
  return out;
}

HierarchyTree build_hierarchy(const DomainModel& model) {
  HierarchyTree tree;
  std::set<std::string> nodes;
  for (auto& e : model.entities())
    if (e.category == Category::Classes) nodes.insert(e.iri);

  std::map<std::string, std::set<std::string>> parents;
  std::map<std::string, std::set<std::string>> all_children;
  std::size_t hierarchy_triples = 0;
  for (auto& [parent, child] : model.hierarchy_edges()) {
    ++hierarchy_triples;
    if (!nodes.count(parent) || !nodes.count(child)) continue;
    parents[child].insert(parent);
    all_children[parent].insert(child);
  }
  if (nodes.empty() && hierarchy_triples == 0)
    throw Error("cannot build a hierarchy: model has no Classes entities and no hierarchy triples");

  // Cycle check over every hierarchy edge between classes.
  std::map<std::string, int> color;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    color[n] = 1;
    stack.push_back(n);
    if (auto it = all_children.find(n); it != all_children.end()) {
      for (auto& c : it->second) {
        if (color[c] == 1) {
          auto from = std::find(stack.begin(), stack.end(), c);
          std::vector<std::string> cycle(from, stack.end());
          cycle.push_back(c);
          throw Error("hierarchy cycle: " + join(cycle, " -> "));
        }
        if (color[c] == 0) visit(c);
      }
    }
    stack.pop_back();
    color[n] = 2;
  };
  for (auto& n : nodes)
    if (color[n] == 0) visit(n);

  for (auto& [child, ps] : parents) {
    tree.parent_of[child] = *ps.begin();
    if (ps.size() > 1)
      tree.warnings.push_back(fmt::format("{} has {} parents; keeping {}", child, ps.size(), *ps.begin()));
  }
  for (auto& [child, parent] : tree.parent_of) tree.children[parent].push_back(child);

  for (auto& n : nodes)
    if (!tree.parent_of.count(n)) tree.roots.push_back(n);

  std::deque<std::string> queue;
  for (auto& r : tree.roots) {
    tree.level[r] = 0;
    queue.push_back(r);
  }
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (auto it = tree.children.find(cur); it != tree.children.end())
      for (auto& c : it->second) {
        tree.level[c] = tree.level[cur] + 1;
        queue.push_back(c);
      }
  }
  for (auto& n : nodes) {
    if (!tree.parent_of.count(n)) tree.position[n] = NodePosition::Root;
    else if (!tree.children.count(n)) tree.position[n] = NodePosition::Leaf;
    else tree.position[n] = NodePosition::Intermediate;
  }
  return tree;
}

nlohmann::json to_json(const DomainModel& model) {
  nlohmann::json ents = nlohmann::json::array();
  for (auto& e : model.entities())
    ents.push_back({{"iri", e.iri}, {"label", e.label}, {"category", to_string(e.category)}});
  nlohmann::json trs = nlohmann::json::array();
  for (auto& t : model.triples()) trs.push_back({{"h", t.h}, {"r", t.r}, {"t", t.t}});
  nlohmann::json preds = nlohmann::json::array();
  for (auto& hp : model.hierarchy_predicates)
    preds.push_back({{"name", hp.name}, {"direction", hp.child_to_parent ? "child-to-parent" : "parent-to-child"}});
  std::size_t classes = 0;
  for (auto& e : model.entities()) classes += e.category == Category::Classes;
  return {{"schema", kSchemaVersion},
          {"hierarchy_predicates", preds},
          {"counts",
           {{"entities", model.entities().size()},
            {"classes", classes},
            {"triples", model.triples().size()},
            {"relation_types", model.relation_type_count()},
            {"blank_node_statements", model.counts.blank_node_statements},
            {"literal_statements", model.counts.literal_statements}}},
          {"warnings", model.warnings},
          {"entities", ents},
          {"triples", trs}};
}

DomainModel model_from_json(const nlohmann::json& j) {
  DomainModel model;
  model.hierarchy_predicates.clear();
  for (auto& p : j.at("hierarchy_predicates"))
    model.hierarchy_predicates.push_back(
        {p.at("name").get<std::string>(), p.at("direction").get<std::string>() == "child-to-parent"});
  for (auto& e : j.at("entities")) {
    auto cat = parse_category(e.at("category").get<std::string>());
    if (!cat) throw Error("model.json: unknown category " + e.at("category").dump());
    model.put_entity({e.at("iri"), e.at("label"), *cat});
  }
  for (auto& t : j.at("triples")) model.add_triple({t.at("h"), t.at("r"), t.at("t")});
  if (j.contains("warnings")) model.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("counts")) {
    auto& c = j.at("counts");
    model.counts.blank_node_statements = c.value("blank_node_statements", std::size_t{0});
    model.counts.literal_statements = c.value("literal_statements", std::size_t{0});
  }
  return model;
}

nlohmann::json to_json(const HierarchyTree& tree) {
  nlohmann::json pos = nlohmann::json::object();
  for (auto& [n, p] : tree.position) pos[n] = to_string(p);
  return {{"schema", kSchemaVersion}, {"parent_of", tree.parent_of}, {"roots", tree.roots},
          {"level", tree.level},      {"position", pos},             {"warnings", tree.warnings}};
}

HierarchyTree tree_from_json(const nlohmann::json& j) {
  HierarchyTree tree;
  tree.parent_of = j.at("parent_of").get<std::map<std::string, std::string>>();
  tree.roots = j.at("roots").get<std::vector<std::string>>();
  tree.level = j.at("level").get<std::map<std::string, int>>();
  for (auto& [n, p] : j.at("position").items()) {
    auto s = p.get<std::string>();
    tree.position[n] = s == "Root" ? NodePosition::Root
                       : s == "Intermediate" ? NodePosition::Intermediate
                                             : NodePosition::Leaf;
  }
  for (auto& [child, parent] : tree.parent_of) tree.children[parent].push_back(child);
  if (j.contains("warnings")) tree.warnings = j.at("warnings").get<std::vector<std::string>>();
  return tree;
}

}  // namespace reqplumb
