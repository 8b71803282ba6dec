#include <doctest.h>

#include <set>

#include "reqplumb/requirements.hpp"
#include "reqplumb/text.hpp"
#include "support.hpp"

using namespace reqplumb;

namespace {

std::vector<Pos> tags(const Requirement& r) {
  std::vector<Pos> out;
  for (auto& t : r.tokens) out.push_back(t.pos);
  return out;
}

RequirementSet numbered(std::size_t n) {
  std::string text;
  for (std::size_t i = 1; i <= n; ++i) text += "The system shall log event " + std::to_string(i) + ".\n";
  return testing::requirements(text, "r");
}

}  // namespace

TEST_CASE("normalize_word lower-cases and strips punctuation") {
  CHECK(normalize_word("Drone,") == "drone");
  CHECK(normalize_word("GPS") == "gps");
  CHECK(normalize_word("...") == "");
}

TEST_CASE("split_identifier handles camel case, acronyms and separators") {
  CHECK(split_identifier("MissionElement") == std::vector<std::string>{"mission", "element"});
  CHECK(split_identifier("GPSReceiver") == std::vector<std::string>{"gps", "receiver"});
  CHECK(split_identifier("take_off-command") == std::vector<std::string>{"take", "off", "command"});
  CHECK(normalize_label("HVACEquipment") == "hvac equipment");
}

TEST_CASE("slug is stable") {
  CHECK(slug("object avoidance system") == "object_avoidance_system");
  CHECK(slug("Flight Pattern") == "flight_pattern");
}

TEST_CASE("POS tagging with the shipped lexicon") {
  auto set = testing::requirements("The drone shall hover.\nflight pattern\n");
  REQUIRE(set.size() == 2);
  CHECK(tags(set.requirements[0]) == std::vector<Pos>{Pos::Det, Pos::Noun, Pos::Verb, Pos::Verb});
  CHECK(tags(set.requirements[1]) == std::vector<Pos>{Pos::Noun, Pos::Noun});
  CHECK(set.requirements[0].id == "t-1");
  CHECK(set.requirements[1].id == "t-2");
}

TEST_CASE("unknown words fall back to NOUN") {
  auto lex = PosLexicon::parse("the\tDET\n");
  CHECK(lex.tag("the") == Pos::Det);
  CHECK(lex.tag("zorblax") == Pos::Noun);
}

TEST_CASE("numbered lists are recognized") {
  auto set = parse_requirements("1. The UAV shall land.\n2. The UAV shall hover.\n", "n", RequirementFormat::NumberedList);
  REQUIRE(set.size() == 2);
  CHECK(set.requirements[1].text == "The UAV shall hover.");
}

TEST_CASE("known_size rounds up") {
  CHECK(known_size(10, 0.7) == 7);
  CHECK(known_size(62, 0.7) == 44);
  CHECK(known_size(65, 0.7) == 46);
  CHECK(known_size(3, 0.5) == 2);
}

TEST_CASE("split is a deterministic partition") {
  auto set = numbered(20);
  SplitSpec spec{0.7, 11, 0};
  auto [k1, h1] = split_requirements(set, spec);
  auto [k2, h2] = split_requirements(set, spec);
  CHECK(k1.size() == 14);
  CHECK(h1.size() == 6);

  std::vector<std::string> a, b;
  for (auto& r : k1.requirements) a.push_back(r.id);
  for (auto& r : k2.requirements) b.push_back(r.id);
  CHECK(a == b);

  std::set<std::string> all;
  for (auto& r : k1.requirements) all.insert(r.id);
  for (auto& r : h1.requirements) CHECK(all.insert(r.id).second);
  CHECK(all.size() == 20);

  // file order is kept on both sides
  for (std::size_t i = 1; i < k1.size(); ++i)
    CHECK(std::stoi(k1.requirements[i - 1].id.substr(2)) < std::stoi(k1.requirements[i].id.substr(2)));

  auto [k3, h3] = split_requirements(set, SplitSpec{0.7, 11, 1});
  std::vector<std::string> c;
  for (auto& r : k3.requirements) c.push_back(r.id);
  CHECK(c != a);
}

TEST_CASE("requirements survive a JSONL round trip") {
  auto set = testing::requirements("The drone shall hover.\nThe camera shall record video.\n");
  auto back = requirements_from_jsonl(to_jsonl(set), set.name);
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) CHECK(back.requirements[i] == set.requirements[i]);
}
