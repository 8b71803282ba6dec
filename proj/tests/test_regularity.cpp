#include <doctest.h>

#include <functional>

#include "cases.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/regularity.hpp"
#include "support.hpp"

using namespace reqplumb;
using cases::t_iri;

TEST_CASE("AHME on the mission element / remote parameter case") {
  auto c = cases::ahme_case();
  auto tree = build_hierarchy(c.model);
  REQUIRE(c.mapped.size() == 23);
  CHECK(tree.level.at(t_iri("MissionElement")) == 1);
  CHECK(tree.level.at(t_iri("RemoteParameter")) == 5);
  CHECK(ahme(tree, c.mapped, t_iri("MissionElement")) == doctest::Approx(6.0 / 23.0));
  CHECK(ahme(tree, c.mapped, t_iri("RemoteParameter")) == doctest::Approx(10.0 / 23.0));
  CHECK(ahme(tree, c.mapped, t_iri("MissionElement")) == doctest::Approx(0.26).epsilon(0.02));
  CHECK(ahme(tree, c.mapped, t_iri("RemoteParameter")) == doctest::Approx(0.43).epsilon(0.02));
  CHECK(ahme(tree, c.mapped, t_iri("UAVConcept")) == 0.0);
  CHECK_THROWS_AS(ahme(tree, {}, t_iri("UAVConcept")), Error);
  CHECK_THROWS_AS(ahme(tree, c.mapped, t_iri("Nowhere")), Error);
}

TEST_CASE("AHME equals an explicit recount on random trees") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<int> parent(30, -1);
    for (int i = 1; i < 30; ++i) {
      parent[i] = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(i)));
      edges.push_back({fmt::format("N{}", parent[i]), fmt::format("N{}", i)});
    }
    auto model = cases::tree_model(edges);
    auto tree = build_hierarchy(model);
    std::set<std::string> mapped;
    std::vector<int> mapped_ids;
    for (int i = 0; i < 30; ++i)
      if (uniform01(rng) < 0.4) {
        mapped.insert(t_iri(fmt::format("N{}", i)));
        mapped_ids.push_back(i);
      }
    if (mapped.empty()) continue;
    auto is_ancestor = [&](int a, int n) {
      for (int p = parent[n]; p != -1; p = parent[p])
        if (p == a) return true;
      return false;
    };
    for (int node = 0; node < 30; ++node) {
      int depth = 0;
      for (int p = parent[node]; p != -1; p = parent[p]) ++depth;
      int count = 0;
      for (int m : mapped_ids) count += is_ancestor(node, m);
      double expect = static_cast<double>(count) / static_cast<double>(mapped.size()) * depth;
      CHECK(ahme(tree, mapped, t_iri(fmt::format("N{}", node))) == expect);
    }
  }
}

TEST_CASE("family rules") {
  CHECK(parse_family_rule("top_k(3)").kind == FamilyRule::Kind::TopK);
  CHECK(parse_family_rule("top_k(3)").k == 3);
  CHECK(parse_family_rule(" relative( 0.5 ) ").alpha == 0.5);
  CHECK(to_string(parse_family_rule("relative(0.5)")) == "relative(0.5)");
  CHECK_THROWS_AS(parse_family_rule("top_k(0)"), Error);
  CHECK_THROWS_AS(parse_family_rule("relative(1.5)"), Error);
  CHECK_THROWS_AS(parse_family_rule("best(3)"), Error);

  auto c = cases::ahme_case();
  auto tree = build_hierarchy(c.model);

  auto top1 = select_families(tree, c.model, c.mapped, parse_family_rule("top_k(1)"));
  REQUIRE(top1.roots.size() == 1);
  CHECK(top1.roots[0].node == t_iri("Other"));  // 15/23
  CHECK(top1.scope.size() == 16);

  auto rel = select_families(tree, c.model, c.mapped, parse_family_rule("relative(0.5)"));
  double best = 15.0 / 23.0;
  for (auto& r : rel.ranking) {
    bool chosen = std::any_of(rel.roots.begin(), rel.roots.end(), [&](auto& x) { return x.node == r.node; });
    CHECK(chosen == (r.ahme >= 0.5 * best - 1e-12));
  }
  for (std::size_t i = 1; i < rel.ranking.size(); ++i) CHECK(rel.ranking[i - 1].ahme >= rel.ranking[i].ahme);
  CHECK(std::any_of(rel.roots.begin(), rel.roots.end(), [](auto& x) { return x.node == t_iri("RemoteParameter"); }));
  CHECK_FALSE(std::any_of(rel.roots.begin(), rel.roots.end(), [](auto& x) { return x.node == t_iri("MissionElement"); }));
  CHECK(rel.scope.count(t_iri("Remote0")));

  auto back = families_from_json(to_json(rel));
  CHECK(back.scope == rel.scope);
  REQUIRE(back.roots.size() == rel.roots.size());
  CHECK(back.roots[0].ahme == doctest::Approx(rel.roots[0].ahme));
}

TEST_CASE("entity type and position distributions") {
  const char* ttl = R"(
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix ex: <http://example.org/d#> .
ex:Root a owl:Class .
ex:Mid a owl:Class ; rdfs:subClassOf ex:Root .
ex:Leaf a owl:Class ; rdfs:subClassOf ex:Mid .
ex:carries a owl:ObjectProperty .
ex:unit1 a owl:NamedIndividual .
)";
  auto model = testing::turtle_model(ttl);
  auto m = build_mapping({"leaf", "mid", "carries", "unit1", "nothing"}, model, {}, std::nullopt);
  auto d = entity_type_distribution(m, model);
  CHECK(d.total == 4);
  CHECK(d.fraction(Category::Classes) == doctest::Approx(0.5));
  CHECK(d.fraction(Category::ObjectProperty) == doctest::Approx(0.25));

  auto tree = build_hierarchy(model);
  auto p = node_position_distribution(m.mapped_entities(), tree);
  CHECK(p.leaf == 1);
  CHECK(p.intermediate == 1);
  CHECK(p.root == 0);
  CHECK(p.untracked == 2);
  CHECK(p.leaf_fraction() == doctest::Approx(0.5));
}

TEST_CASE("requirement side statistics") {
  const char* ttl = R"(
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix ex: <http://example.org/r#> .
ex:Camera a owl:Class . ex:Gimbal a owl:Class . ex:Battery a owl:Class .
)";
  auto model = testing::turtle_model(ttl);
  auto reqs = testing::requirements(
      "The camera and gimbal shall be calibrated.\n"
      "The battery shall power the camera.\n"
      "The pilot shall land.\n"
      "The battery shall be charged.\n");
  auto m = build_mapping({"camera", "gimbal", "battery"}, model, {});
  auto s = requirement_side_stats(reqs, m);
  CHECK(s.requirements == 4);
  CHECK(s.with_mapped == 3);
  CHECK(s.with_two_plus == 2);
  CHECK(s.with_juxtaposition == 1);
  CHECK(s.mapped_fraction() == doctest::Approx(0.75));
}
