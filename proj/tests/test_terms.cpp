#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "reqplumb/terms.hpp"
#include "support.hpp"

using namespace reqplumb;

namespace {

const char* kReqs =
    "The object avoidance system shall detect obstacles.\n"
    "The object avoidance system shall alert the pilot.\n"
    "The avoidance system shall use the front camera.\n"
    "The flight controller shall store the flight plan.\n"
    "The ground station shall display the flight plan and battery level.\n"
    "The low battery warning shall trigger a safe landing.\n";

StopWords stop() { return load_stopwords(testing::data_dir() / "lexicon" / "stopwords.txt"); }

bool pattern_ok(const std::vector<Token>& w) {
  // ADJ* NOUN+
  std::size_t i = 0;
  while (i < w.size() && w[i].pos == Pos::Adj) ++i;
  if (i == w.size()) return false;
  for (; i < w.size(); ++i)
    if (w[i].pos != Pos::Noun) return false;
  return true;
}

bool contains(const std::vector<std::string>& big, const std::vector<std::string>& small) {
  if (small.size() >= big.size()) return false;
  for (std::size_t i = 0; i + small.size() <= big.size(); ++i)
    if (std::equal(small.begin(), small.end(), big.begin() + i)) return true;
  return false;
}

// Straight from the definition: every window, every nesting candidate.
std::map<std::vector<std::string>, double> brute_cvalue(const RequirementSet& reqs, const StopWords& sw) {
  std::map<std::vector<std::string>, std::size_t> f;
  for (auto& r : reqs.requirements)
    for (std::size_t i = 0; i < r.tokens.size(); ++i)
      for (std::size_t j = i + 1; j <= r.tokens.size() && j - i <= kMaxTermWords; ++j) {
        std::vector<Token> w(r.tokens.begin() + i, r.tokens.begin() + j);
        bool clean = true;
        for (auto& t : w) clean = clean && !sw.count(t.norm);
        if (!clean || !pattern_ok(w)) continue;
        std::vector<std::string> words;
        for (auto& t : w) words.push_back(t.norm);
        ++f[words];
      }
  std::map<std::vector<std::string>, double> out;
  for (auto& [a, fa] : f) {
    double sum = 0;
    int n = 0;
    for (auto& [b, fb] : f)
      if (contains(b, a)) {
        sum += fb;
        ++n;
      }
    double len = a.size() == 1 ? 1.0 : std::log2(double(a.size()));
    out[a] = n == 0 ? len * fa : len * (fa - sum / n);
  }
  return out;
}

}  // namespace

TEST_CASE("cvalue of a nested two-word term") {
  // "avoidance system" seen 3 times, twice inside "object avoidance system"
  CHECK(cvalue_of(2, 3, {2}) == doctest::Approx(1.0));
  CHECK(cvalue_of(3, 2, {}) == doctest::Approx(2 * std::log2(3.0)));
  CHECK(cvalue_of(1, 4, {}) == doctest::Approx(4.0));
  CHECK(cvalue_of(1, 4, {2, 4}) == doctest::Approx(1.0));
}

TEST_CASE("candidates on the avoidance example") {
  auto reqs = testing::requirements(kReqs);
  auto ranked = cvalue_rank(extract_candidates(reqs, stop()));
  std::map<std::string, TermCandidate> by;
  for (auto& c : ranked) by[c.text()] = c;
  REQUIRE(by.count("avoidance system"));
  CHECK(by["avoidance system"].frequency == 3);
  CHECK(by["avoidance system"].nested_in == std::vector<std::string>{"object avoidance system"});
  CHECK(by["avoidance system"].cvalue == doctest::Approx(1.0));
  CHECK(by["object avoidance system"].cvalue == doctest::Approx(2 * std::log2(3.0)));
  CHECK(by.count("flight plan"));
  CHECK_FALSE(by.count("the flight plan"));
  CHECK_FALSE(by.count("shall"));
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].cvalue >= ranked[i].cvalue);
}

TEST_CASE("cvalue matches a brute-force oracle") {
  auto reqs = testing::requirements(kReqs);
  auto sw = stop();
  auto expect = brute_cvalue(reqs, sw);
  auto ranked = cvalue_rank(extract_candidates(reqs, sw));
  REQUIRE(ranked.size() == expect.size());
  for (auto& c : ranked) {
    REQUIRE(expect.count(c.words));
    CHECK(c.cvalue == doctest::Approx(expect[c.words]));
  }
}

TEST_CASE("cvalue oracle on random tagged text") {
  std::mt19937 rng(5);
  const std::vector<std::pair<std::string, Pos>> vocab = {
      {"red", Pos::Adj},  {"fast", Pos::Adj},  {"motor", Pos::Noun}, {"pump", Pos::Noun},
      {"valve", Pos::Noun}, {"the", Pos::Det}, {"shall", Pos::Verb}, {"of", Pos::Prep}};
  StopWords sw{"the", "shall", "of"};
  for (int trial = 0; trial < 20; ++trial) {
    RequirementSet reqs;
    std::size_t budget = 50;
    while (budget > 0) {
      Requirement r;
      r.id = "r" + std::to_string(reqs.size());
      std::size_t n = std::min<std::size_t>(budget, 3 + rng() % 8);
      for (std::size_t i = 0; i < n; ++i) {
        auto& [w, p] = vocab[rng() % vocab.size()];
        r.tokens.push_back({w, w, p});
      }
      budget -= n;
      reqs.requirements.push_back(r);
    }
    auto expect = brute_cvalue(reqs, sw);
    auto ranked = cvalue_rank(extract_candidates(reqs, sw));
    REQUIRE(ranked.size() == expect.size());
    for (auto& c : ranked) CHECK(c.cvalue == doctest::Approx(expect[c.words]));
  }
}

TEST_CASE("threshold and curation") {
  auto reqs = testing::requirements(kReqs);
  auto ranked = cvalue_rank(extract_candidates(reqs, stop()));
  auto base = select_terms(ranked, 1.0);
  for (auto& t : base.terms) CHECK(t.cvalue >= 1.0);
  CHECK(base.candidate_count == ranked.size());
  CHECK(base.contains("avoidance system"));
  CHECK_FALSE(base.contains("low battery"));

  Decisions d{{"avoidance_system", Status::Rejected}, {"low_battery", Status::Accepted}};
  auto cur = select_terms(ranked, 1.0, &d);
  CHECK_FALSE(cur.contains("avoidance system"));
  CHECK(cur.contains("low battery"));
  REQUIRE(cur.rejected.size() == 1);
  CHECK(cur.rejected[0].text() == "avoidance system");

  auto back = termset_from_json(to_json(cur));
  CHECK(back.labels() == cur.labels());
  CHECK(decisions_from_json(to_json(d)) == d);
}

TEST_CASE("term ids") {
  CHECK(term_id("object avoidance system") == "object_avoidance_system");
  TermCandidate c{{"flight", "plan"}, 2, {}, 2.0, Status::Auto};
  CHECK(c.text() == "flight plan");
  CHECK(c.id() == "flight_plan");
}
