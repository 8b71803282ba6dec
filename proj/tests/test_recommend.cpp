#include <doctest.h>

#include <algorithm>

#include "cases.hpp"
#include "reqplumb/recommend.hpp"
#include "reqplumb/regularity.hpp"
#include "support.hpp"

using namespace reqplumb;
using cases::t_iri;

namespace {

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sb(b.begin(), b.end());
  return std::all_of(a.begin(), a.end(), [&](auto& x) { return sb.count(x) != 0; });
}

struct World {
  DomainModel model;
  HierarchyTree tree;
  std::set<std::string> mapped;
  FamilySelection families;
};

// Random tree of classes plus a few non-class entities.
World random_world(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 1; i < 25; ++i)
    edges.push_back({fmt::format("N{}", uniform_index(rng, static_cast<std::size_t>(i))), fmt::format("N{}", i)});
  World w;
  w.model = cases::tree_model(edges);
  w.model.put_entity({"http://example.org/t#prop", "prop", Category::ObjectProperty});
  w.model.put_entity({"http://example.org/t#ind", "ind", Category::NamedIndividual});
  w.tree = build_hierarchy(w.model);
  for (int i = 0; i < 25; ++i)
    if (uniform01(rng) < 0.3) w.mapped.insert(t_iri(fmt::format("N{}", i)));
  if (w.mapped.empty()) w.mapped.insert(t_iri("N3"));
  w.families = select_families(w.tree, w.model, w.mapped, parse_family_rule("relative(0.5)"));
  return w;
}

}  // namespace

TEST_CASE("F2 formula") {
  CHECK(f2_score(0, 0) == 0.0);
  CHECK(f2_score(1, 1) == doctest::Approx(1.0));
  CHECK(f2_score(0.5, 0.5) == doctest::Approx(0.5));
  CHECK(f2_score(0.2, 0.8) == doctest::Approx(5 * 0.2 * 0.8 / (0.8 + 0.8)));
}

TEST_CASE("F2 reproduces the reference strategy and family rows") {
  for (auto& rows : {cases::kStrategyRows, cases::kFamilyRows})
    for (auto& r : rows) {
      INFO(r.name);
      CHECK(std::abs(f2_score(r.precision, r.recall) - r.f2) <= 0.01);
    }
}

TEST_CASE("strategies narrow the candidate set") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto w = random_world(seed);
    auto none = recommend(w.model, w.tree, w.mapped, Strategy::None);
    auto type = recommend(w.model, w.tree, w.mapped, Strategy::EntityType);
    auto node = recommend(w.model, w.tree, w.mapped, Strategy::NodeType);
    auto fam = recommend(w.model, w.tree, w.mapped, Strategy::FamilyBelonging, &w.families);
    auto comb = recommend(w.model, w.tree, w.mapped, Strategy::Combination, &w.families);
    CHECK(subset(type.entities, none.entities));
    CHECK(subset(node.entities, type.entities));
    CHECK(subset(fam.entities, none.entities));
    CHECK(subset(comb.entities, node.entities));
    CHECK(subset(comb.entities, fam.entities));
    for (auto& e : none.entities) CHECK_FALSE(w.mapped.count(e));
    CHECK(none.entities.size() == w.model.entities().size() - w.mapped.size());

    // recall can only drop as the scope narrows
    std::vector<std::string> gold;
    Rng rng(seed * 7);
    for (auto& e : w.model.entities())
      if (!w.mapped.count(e.iri) && uniform01(rng) < 0.3) gold.push_back(e.label);
    if (gold.empty()) continue;
    GoldMatcher gm(gold, {});
    auto r = [&](const Recommendation& rec) { return evaluate(rec, w.model, gm).recall; };
    CHECK(r(none) == doctest::Approx(1.0));
    CHECK(r(type) <= r(none));
    CHECK(r(node) <= r(type));
    CHECK(r(fam) <= r(none));
    CHECK(r(comb) <= std::min(r(node), r(fam)));
  }
}

TEST_CASE("family strategies need a selection") {
  auto w = random_world(3);
  CHECK_THROWS_AS(recommend(w.model, w.tree, w.mapped, Strategy::FamilyBelonging), Error);
}

TEST_CASE("evaluation counts hits through synonyms") {
  auto model = cases::tree_model({{"Device", "Lamp"}, {"Device", "Monitor"}, {"Device", "Fan"}, {"Device", "Heater"}});
  auto tree = build_hierarchy(model);
  std::vector<SynonymPair> acc = {{"screen", "monitor", SynRule::Lexicon, 1.0, Status::Auto}};
  GoldMatcher gm({"lamp", "screen", "kettle"}, acc);
  CHECK(gm.hits("Monitor") == std::vector<std::string>{"screen"});
  CHECK(gm.hits("fan").empty());

  auto rec = recommend(model, tree, {t_iri("Device")}, Strategy::None);
  auto m = evaluate(rec, model, gm);
  CHECK(m.gold == 3);
  CHECK(m.gold_hit == 2);
  CHECK(m.recommended == 4);
  CHECK(m.recommended_hit == 2);
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.precision == doctest::Approx(0.5));
  CHECK(m.f2 == doctest::Approx(f2_score(0.5, 2.0 / 3.0)));
  CHECK_THROWS_AS(evaluate(rec, model, GoldMatcher({}, {})), Error);
}

TEST_CASE("gold terms drop what is already known or mapped") {
  auto model = cases::tree_model({{"Device", "Lamp"}, {"Device", "Monitor"}});
  std::vector<SynonymPair> acc = {{"screen", "display", SynRule::Lexicon, 1.0, Status::Auto}};
  auto gold = gold_terms({"screen", "lamp", "fan", "monitor", "kettle"}, {"display", "pump"}, acc, model,
                         {t_iri("Monitor")});
  CHECK(gold == std::vector<std::string>{"fan", "kettle", "lamp"});
}

TEST_CASE("per-family breakdown") {
  auto model = cases::tree_model({{"Root", "A"}, {"Root", "B"}, {"A", "A1"}, {"A", "A2"}, {"A", "A3"}, {"B", "B1"}});
  auto tree = build_hierarchy(model);
  std::set<std::string> mapped{t_iri("A1")};
  auto fam = select_families(tree, model, mapped, parse_family_rule("top_k(1)"));
  REQUIRE(fam.roots.size() == 1);
  CHECK(fam.roots[0].node == t_iri("A"));
  GoldMatcher gm({"a2", "b1"}, {});
  auto rows = family_breakdown(model, tree, mapped, fam, gm);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].should_have == 1);
  CHECK(rows[0].actually == 1);
  CHECK(rows[0].metrics.recall == doctest::Approx(1.0));
}
