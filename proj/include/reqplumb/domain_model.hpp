#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "reqplumb/rdf.hpp"

namespace reqplumb {

enum class Category { Classes, ObjectProperty, DataProperty, NamedIndividual, AnnotationProperty, Other };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

struct Entity {
  std::string iri;
  std::string label;  // normalized, see normalize_label()
  Category category = Category::Other;

  bool operator==(const Entity&) const = default;
};

struct FactTriple {
  std::string h;
  std::string r;  // predicate IRI
  std::string t;

  auto operator<=>(const FactTriple&) const = default;
};

// A predicate that encodes the class hierarchy. `child_to_parent` is true for
// rdfs:subClassOf style (child r parent) and false for hasSubClasses style.
struct HierarchyPredicate {
  std::string name;
  bool child_to_parent = true;

  bool matches(std::string_view predicate_iri) const;
  bool operator==(const HierarchyPredicate&) const = default;
};

std::vector<HierarchyPredicate> default_hierarchy_predicates();

// "rdfs:subClassOf", "hasSubClasses=parent-to-child", "partOf=child-to-parent".
// Without an explicit direction, names containing "hasSub" are parent-to-child.
HierarchyPredicate parse_hierarchy_predicate(std::string_view spec);

class DomainModel {
 public:
  std::vector<HierarchyPredicate> hierarchy_predicates = default_hierarchy_predicates();
  std::vector<std::string> warnings;

  struct Counts {
    std::size_t type_statements = 0;
    std::size_t literal_statements = 0;
    std::size_t blank_node_statements = 0;
    std::size_t vocabulary_statements = 0;
  } counts;

  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<FactTriple>& triples() const { return triples_; }

  const Entity* find(std::string_view iri) const;
  // Inserts or replaces by IRI.
  void put_entity(Entity e);
  // Both endpoints must already be entities.
  void add_triple(FactTriple t);

  std::optional<HierarchyPredicate> hierarchy_predicate_for(std::string_view predicate) const;
  bool is_hierarchy(const FactTriple& t) const { return hierarchy_predicate_for(t.r).has_value(); }

  // (parent, child) for every hierarchy triple, regardless of category.
  std::vector<std::pair<std::string, std::string>> hierarchy_edges() const;

  std::size_t relation_type_count() const;

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<FactTriple> triples_;
  std::map<FactTriple, bool> triple_set_;
};

DomainModel build_model(const std::vector<rdf::Statement>& statements,
                        std::vector<HierarchyPredicate> predicates = default_hierarchy_predicates());

DomainModel parse_rdf(const std::filesystem::path& path, rdf::Syntax syntax,
                      std::vector<HierarchyPredicate> predicates = default_hierarchy_predicates());

// Entities with category Classes, in IRI order. Adds a warning when empty.
std::vector<Entity> classes_of(const DomainModel& model, std::vector<std::string>* warnings = nullptr);

enum class NodePosition { Root, Intermediate, Leaf };
std::string_view to_string(NodePosition p);

struct HierarchyTree {
  std::map<std::string, std::string> parent_of;
  std::map<std::string, std::vector<std::string>> children;
  std::vector<std::string> roots;
  std::map<std::string, int> level;
  std::map<std::string, NodePosition> position;
  std::vector<std::string> warnings;

  bool contains(std::string_view node) const { return level.count(std::string(node)) != 0; }
  // Every node strictly below `node`, in breadth-first order.
  std::vector<std::string> descendants(std::string_view node) const;
  std::size_t size() const { return level.size(); }
};

// Tree over Classes entities. A node with several parents keeps the
// lexicographically first parent IRI and a warning is recorded. Throws on
// cycles.
HierarchyTree build_hierarchy(const DomainModel& model);

nlohmann::json to_json(const DomainModel& model);
DomainModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HierarchyTree& tree);
HierarchyTree tree_from_json(const nlohmann::json& j);

}  // namespace reqplumb
