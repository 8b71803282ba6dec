#include <doctest.h>

#include "reqplumb/mapping.hpp"
#include "support.hpp"

using namespace reqplumb;

namespace {

const char* kTtl = R"(
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix ex: <http://example.org/m#> .
ex:Vehicle a owl:Class .
ex:FlightPhase a owl:Class ; rdfs:subClassOf ex:Vehicle .
ex:Camera a owl:Class ; rdfs:subClassOf ex:Vehicle .
ex:camera a owl:NamedIndividual .
ex:carries a owl:ObjectProperty .
)";

}  // namespace

TEST_CASE("direct and synonym mapping") {
  auto model = testing::turtle_model(kTtl);
  std::vector<SynonymPair> acc = {{"flight pattern", "flight phase", SynRule::R2, 0.9, Status::Auto}};
  auto m = build_mapping({"camera", "flight pattern", "battery", "Camera"}, model, acc);
  CHECK(m.rt_size == 3);
  CHECK(m.mapped_terms == 2);
  CHECK(m.rate == doctest::Approx(2.0 / 3.0));
  REQUIRE(m.pairs.size() == 2);
  CHECK(m.entities_for("camera") == std::vector<std::string>{"http://example.org/m#Camera"});
  auto fp = m.entities_for("flight pattern");
  CHECK(fp == std::vector<std::string>{"http://example.org/m#FlightPhase"});
  for (auto& p : m.pairs)
    if (p.term == "flight pattern") CHECK(p.kind == MappingKind::Synonym);
  CHECK(m.terms_for("http://example.org/m#Camera") == std::vector<std::string>{"camera"});
}

TEST_CASE("unrestricted mapping reaches every category") {
  auto model = testing::turtle_model(kTtl);
  auto m = build_mapping({"camera", "carries"}, model, {}, std::nullopt);
  CHECK(m.mapped_entities().size() == 3);
  CHECK(m.rate == doctest::Approx(1.0));
}

TEST_CASE("synonyms in either orientation") {
  auto model = testing::turtle_model(kTtl);
  std::vector<SynonymPair> acc = {{"flight phase", "flight pattern", SynRule::R2, 0.9, Status::Auto}};
  auto m = build_mapping({"flight pattern"}, model, acc);
  CHECK(m.mapped_terms == 1);
}

TEST_CASE("mapping without terms is an error") {
  auto model = testing::turtle_model(kTtl);
  CHECK_THROWS_AS(build_mapping({}, model, {}), Error);
}

TEST_CASE("mapping JSON round trip") {
  auto model = testing::turtle_model(kTtl);
  auto m = build_mapping({"camera", "battery"}, model, {});
  auto back = mapping_from_json(to_json(m));
  CHECK(back.pairs == m.pairs);
  CHECK(back.rate == doctest::Approx(m.rate));
  CHECK(back.rt_size == m.rt_size);
  CHECK(back.restrict_to == m.restrict_to);
}
