// Acceptance checks; one PASS/FAIL/SKIP line per criterion.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "cases.hpp"
#include "reqplumb/completion.hpp"
#include "reqplumb/config.hpp"
#include "reqplumb/pipeline.hpp"
#include "support.hpp"

using namespace reqplumb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind = Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Skip, std::move(d)}; }

// ---------------------------------------------------------------------------

Outcome f2_conformance() {
  // completed vs original family belonging, both domains
  const std::vector<cases::F2Row> comparison = {{"UAV original", 0.32, 0.16, 0.26},
                                          {"UAV completed", 0.45, 0.14, 0.32},
                                          {"BAS original", 0.5, 0.24, 0.41},
                                          {"BAS completed", 0.86, 0.23, 0.55}};
  std::size_t n = 0;
  double worst = 0;
  for (auto* rows : {&cases::kStrategyRows, &cases::kFamilyRows, &comparison})
    for (auto& r : *rows) {
      double d = std::abs(f2_score(r.precision, r.recall) - r.f2);
      worst = std::max(worst, d);
      if (d > 0.01) return fail(fmt::format("{}: F2({}, {}) = {:.4f}, expected {}", r.name, r.recall, r.precision,
                                            f2_score(r.precision, r.recall), r.f2));
      ++n;
    }
  return pass(fmt::format("{} rows, max deviation {:.4f}", n, worst));
}

Outcome ahme_arithmetic() {
  auto c = cases::ahme_case();
  auto tree = build_hierarchy(c.model);
  double me = ahme(tree, c.mapped, cases::t_iri("MissionElement"));
  double rp = ahme(tree, c.mapped, cases::t_iri("RemoteParameter"));
  auto detail = fmt::format("|mapped| = {}, MissionElement = {:.4f}, RemoteParameter = {:.4f}", c.mapped.size(), me, rp);
  if (c.mapped.size() != 23 || std::abs(me - 0.26) > 0.005 || std::abs(rp - 0.43) > 0.005) return fail(detail);
  return pass(detail);
}

// ---------------------------------------------------------------------------

EmbeddingSpace toy_space() {
  EmbeddingSpace s;
  s.dim = 3;
  s.bias = 2.0;
  s.entities = {"e0", "e1", "e2", "e3"};
  s.terms = {"t0", "t1", "t2"};
  s.relations = {"r0", "r1"};
  s.nodes = Eigen::MatrixXd::Zero(7, 3);
  s.rel = Eigen::MatrixXd::Zero(2, 3);
  Rng rng(17);
  for (Eigen::Index i = 0; i < s.nodes.size(); ++i) s.nodes.data()[i] = uniform(rng, -1, 1);
  for (Eigen::Index i = 0; i < s.rel.size(); ++i) s.rel.data()[i] = uniform(rng, -1, 1);
  return s;
}

double worst_gradient_error(EmbeddingSpace s, const JointProblem& p) {
  Gradients g;
  joint_loss(s, p, &g);
  const double h = 1e-4;
  double worst = 0;
  auto probe = [&](Eigen::MatrixXd& m, const Eigen::MatrixXd& analytic) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      double keep = m.data()[i];
      m.data()[i] = keep + h;
      double up = joint_loss(s, p).total;
      m.data()[i] = keep - h;
      double down = joint_loss(s, p).total;
      m.data()[i] = keep;
      double num = (up - down) / (2 * h), ana = analytic.data()[i];
      double scale = std::abs(num) + std::abs(ana);
      if (scale > 1e-7) worst = std::max(worst, std::abs(num - ana) / scale);
    }
  };
  probe(s.nodes, g.nodes);
  probe(s.rel, g.rel);
  return worst;
}

Outcome gradient_check() {
  JointProblem k, r, a;
  k.knowledge = {{0, 0, 1}, {1, 1, 2}, {3, 0, 2}};
  r.requirement = {{4, 5}, {5, 4}, {6, 5}, {5, 6}};
  a.alignment = {{4, 0, 1}, {0, 1, 6}, {5, 1, 4}};
  std::map<std::string, double> err = {{"L_K", worst_gradient_error(toy_space(), k)},
                                       {"L_R", worst_gradient_error(toy_space(), r)},
                                       {"L_A", worst_gradient_error(toy_space(), a)}};
  std::string detail;
  bool ok = true;
  for (auto& [name, e] : err) {
    detail += fmt::format("{}{} {:.2e}", detail.empty() ? "" : ", ", name, e);
    ok = ok && e <= 1e-4;
  }
  return ok ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------------------

bool cvalue_oracle(std::string& detail) {
  auto reqs = testing::requirements(
      "The object avoidance system shall detect obstacles.\n"
      "The object avoidance system shall alert the pilot.\n"
      "The avoidance system shall use the front camera.\n"
      "The ground station shall display the flight plan.\n");
  std::size_t tokens = 0;
  for (auto& r : reqs.requirements) tokens += r.tokens.size();
  auto sw = load_stopwords(testing::data_dir() / "lexicon" / "stopwords.txt");

  std::map<std::vector<std::string>, std::size_t> f;
  for (auto& r : reqs.requirements)
    for (std::size_t i = 0; i < r.tokens.size(); ++i)
      for (std::size_t j = i + 1; j <= r.tokens.size() && j - i <= kMaxTermWords; ++j) {
        std::size_t k = i;
        while (k < j && r.tokens[k].pos == Pos::Adj) ++k;
        bool ok = k < j;
        for (std::size_t m = k; m < j; ++m) ok = ok && r.tokens[m].pos == Pos::Noun;
        for (std::size_t m = i; m < j; ++m) ok = ok && !sw.count(r.tokens[m].norm);
        if (!ok) continue;
        std::vector<std::string> w;
        for (std::size_t m = i; m < j; ++m) w.push_back(r.tokens[m].norm);
        ++f[w];
      }
  auto nested = [](const std::vector<std::string>& big, const std::vector<std::string>& small) {
    if (small.size() >= big.size()) return false;
    for (std::size_t i = 0; i + small.size() <= big.size(); ++i)
      if (std::equal(small.begin(), small.end(), big.begin() + i)) return true;
    return false;
  };
  auto ranked = cvalue_rank(extract_candidates(reqs, sw));
  if (ranked.size() != f.size()) {
    detail = fmt::format("C-Value: {} candidates, oracle {}", ranked.size(), f.size());
    return false;
  }
  for (auto& c : ranked) {
    auto it = f.find(c.words);
    if (it == f.end()) {
      detail = "C-Value: unexpected candidate " + c.text();
      return false;
    }
    double sum = 0;
    int n = 0;
    for (auto& [b, fb] : f)
      if (nested(b, c.words)) {
        sum += static_cast<double>(fb);
        ++n;
      }
    double len = c.words.size() == 1 ? 1.0 : std::log2(static_cast<double>(c.words.size()));
    double fa = static_cast<double>(it->second);
    double expect = n == 0 ? len * fa : len * (fa - sum / n);
    if (c.cvalue != expect) {
      detail = fmt::format("C-Value of '{}' is {}, oracle {}", c.text(), c.cvalue, expect);
      return false;
    }
  }
  detail = fmt::format("C-Value {} candidates over {} tokens", ranked.size(), tokens);
  return tokens <= 50;
}

bool alignment_oracle(std::string& detail) {
  const char* ttl = R"(
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix ex: <http://example.org/a#> .
ex:Drone a owl:Class . ex:Camera a owl:Class . ex:Battery a owl:Class . ex:Pilot a owl:Class .
ex:carries a owl:ObjectProperty . ex:powers a owl:ObjectProperty . ex:flies a owl:ObjectProperty .
ex:Drone ex:carries ex:Camera .
ex:Battery ex:powers ex:Drone .
ex:Battery ex:powers ex:Camera .
ex:Pilot ex:flies ex:Drone .
)";
  auto model = testing::turtle_model(ttl);
  std::vector<SynonymPair> acc = {{"uav", "drone", SynRule::EmbeddingOnly, 0.9, Status::Accepted},
                                  {"cell", "battery", SynRule::EmbeddingOnly, 0.9, Status::Accepted}};
  auto mapping = build_mapping({"drone", "uav", "camera", "cell", "operator"}, model, acc);
  auto got = alignment_triplets(model.triples(), mapping);
  std::set<NamedTriplet> expect;
  for (auto& fact : model.triples()) {
    std::vector<std::string> hs{entity_key(fact.h)}, ts{entity_key(fact.t)};
    for (auto& w : mapping.terms_for(fact.h)) hs.push_back(term_key(w));
    for (auto& w : mapping.terms_for(fact.t)) ts.push_back(term_key(w));
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (i || j) expect.insert({hs[i], fact.r, ts[j]});
  }
  detail = fmt::format("alignment {} triplets", got.size());
  return std::set<NamedTriplet>(got.begin(), got.end()) == expect && got.size() == expect.size();
}

bool ahme_oracle(std::string& detail) {
  Rng rng(30);
  std::size_t checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> parent(30, -1);
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 1; i < 30; ++i) {
      parent[i] = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(i)));
      edges.push_back({fmt::format("N{}", parent[i]), fmt::format("N{}", i)});
    }
    auto model = cases::tree_model(edges);
    auto tree = build_hierarchy(model);
    std::vector<int> mapped_ids;
    std::set<std::string> mapped;
    for (int i = 0; i < 30; ++i)
      if (uniform01(rng) < 0.35) {
        mapped_ids.push_back(i);
        mapped.insert(cases::t_iri(fmt::format("N{}", i)));
      }
    if (mapped.empty()) continue;
    for (int node = 0; node < 30; ++node) {
      int depth = 0, count = 0;
      for (int p = parent[node]; p != -1; p = parent[p]) ++depth;
      for (int m : mapped_ids)
        for (int p = parent[m]; p != -1; p = parent[p])
          if (p == node) ++count;
      double expect = static_cast<double>(count) / static_cast<double>(mapped.size()) * depth;
      if (ahme(tree, mapped, cases::t_iri(fmt::format("N{}", node))) != expect) {
        detail = fmt::format("AHME differs on trial {} node N{}", trial, node);
        return false;
      }
      ++checked;
    }
  }
  detail = fmt::format("AHME {} nodes on 30-node trees", checked);
  return true;
}

Outcome oracle_suites() {
  std::string a, b, c;
  bool ok = cvalue_oracle(a);
  ok = alignment_oracle(b) && ok;
  ok = ahme_oracle(c) && ok;
  auto detail = fmt::format("{}; {}; {}", a, b, c);
  return ok ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------------------

// Runs the fixture pipeline up to `last` in a scratch workspace.
struct FixtureRun {
  testing::TempDir tmp;
  PipelineConfig cfg;
  std::unique_ptr<Workspace> ws;
  std::unique_ptr<Pipeline> pipeline;

  FixtureRun(const std::string& name, Stage last) {
    testing::copy_curation(name, tmp / "curation");
    cfg = parse_config(
        testing::fixture_config(name, tmp / "curation", "[joint]\ndim = 16\nepochs = 40\n[experiment]\nn_runs = 1\n"),
        tmp.path());
    ws = std::make_unique<Workspace>(tmp / "ws");
    ws->bind(cfg, false);
    pipeline = std::make_unique<Pipeline>(cfg, *ws);
    for (auto s : kAllStages) {
      pipeline->run(s);
      if (s == last) break;
    }
  }
};

bool acyclic(const DomainModel& model) {
  std::map<std::string, std::vector<std::string>> down;
  for (auto& [p, c] : model.hierarchy_edges()) down[p].push_back(c);
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> visit = [&](const std::string& n) {
    state[n] = 1;
    for (auto& c : down[n]) {
      if (state[c] == 1) return false;
      if (state[c] == 0 && !visit(c)) return false;
    }
    state[n] = 2;
    return true;
  };
  for (auto& [n, _] : down)
    if (state[n] == 0 && !visit(n)) return false;
  return true;
}

Outcome structural_safety() {
  FixtureRun run("uav", Stage::Map);
  auto& ws = *run.ws;
  auto in = run.pipeline->experiment_inputs();
  auto base = in.model;
  auto rt = termset_from_json(ws.read_json("extract", "terms_requirements-70.json"));
  auto pairs = synonyms_from_json(ws.read_json("synonyms", "synonyms.json"));
  auto accepted = accepted_synonyms(pairs);
  auto mapping = mapping_from_json(ws.read_json("map", "mapping.json"));
  auto split = ws.read_json("ingest", "split.json");
  RequirementSet known;
  std::set<std::string> known_ids = split.at("known").get<std::set<std::string>>();
  for (auto& r : in.requirements.requirements)
    if (known_ids.count(r.id)) known.requirements.push_back(r);
  auto joint = prepare_joint_inputs(base, known, rt, mapping, in.stopwords);

  Rng rng(2025);
  std::size_t added_total = 0, links_total = 0;
  double min_gain = 1;
  for (int i = 0; i < 100; ++i) {
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 30;
    cfg.seed = static_cast<std::uint64_t>(i);
    auto trained = train_joint(base, joint, cfg);
    CompletionOptions opts{uniform(rng, 0.25, 2.5)};
    auto cm = complete_model(base, trained.space, mapping, rt.labels(), opts);
    if (!acyclic(cm.model)) return fail(fmt::format("run {}: completed hierarchy has a cycle", i));
    std::set<FactTriple> have(cm.model.triples().begin(), cm.model.triples().end());
    for (auto& t : base.triples())
      if (!have.count(t)) return fail(fmt::format("run {}: lost triple {} {} {}", i, t.h, t.r, t.t));
    auto report = completion_report(cm, base, rt.labels(), accepted);
    if (report.rate_after < report.rate_before)
      return fail(fmt::format("run {}: mapping rate fell from {} to {}", i, report.rate_before, report.rate_after));
    added_total += cm.added.size();
    links_total += cm.added_links.size();
    min_gain = std::min(min_gain, report.rate_after - report.rate_before);
  }
  return pass(fmt::format("100 runs on the UAV fixture, {:.1f} entities and {:.1f} links added per run, "
                          "smallest rate gain {:.3f}",
                          added_total / 100.0, links_total / 100.0, min_gain));
}

// ---------------------------------------------------------------------------

Outcome dataset_conditional() {
  const char* env = std::getenv("REQPLUMB_CASE_DATA");
  if (!env) return skip("set REQPLUMB_CASE_DATA to a directory with uav/config.toml and bas/config.toml");
  fs::path root(env);
  struct Target {
    std::string name;
    double rate, completed_rate, f2;
  };
  std::vector<Target> targets = {{"uav", 0.434, 0.7547, 0.32}, {"bas", 0.20, 0.7172, 0.55}};
  for (auto& t : targets)
    if (!fs::exists(root / t.name / "config.toml")) return skip(fmt::format("{} is missing", (root / t.name / "config.toml").string()));

  std::string detail;
  bool ok = true;
  for (auto& t : targets) {
    auto cfg = load_config(root / t.name / "config.toml");
    Workspace ws(root / t.name / "workspace");
    ws.bind(cfg, true);
    Pipeline p(cfg, ws);
    auto start = std::chrono::steady_clock::now();
    p.run_all();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto rep = ws.read_json("evaluate", "evaluation_report.json");
    double rate = 0, crate = 0;
    std::size_t n = 0;
    for (auto& r : rep.at("runs"))
      if (r.at("ok").get<bool>()) {
        rate += r.at("mapping_rate").get<double>();
        crate += r.at("completed_mapping_rate").get<double>();
        ++n;
      }
    if (n == 0) return fail(t.name + ": no complete runs");
    rate /= static_cast<double>(n);
    crate /= static_cast<double>(n);
    auto fam = std::string(to_string(Strategy::FamilyBelonging));
    auto none = std::string(to_string(Strategy::None));
    double f2_cf = rep.at("averages").at("completed").at(fam).at("f2");
    double f2_of = rep.at("averages").at("original").at(fam).at("f2");
    double f2_on = rep.at("averages").at("original").at(none).at("f2");
    bool here = std::abs(rate - t.rate) <= 0.05 && std::abs(crate - t.completed_rate) <= 0.10 &&
                std::abs(f2_cf - t.f2) <= 0.10 && f2_cf > f2_of && f2_of > f2_on;
    ok = ok && here;
    detail += fmt::format("{}{}: rate {:.3f}, completed {:.3f}, F2 {:.3f} > {:.3f} > {:.3f}, {} runs in {:.0f}s{}",
                          detail.empty() ? "" : "; ", t.name, rate, crate, f2_cf, f2_of, f2_on, n, secs,
                          here ? "" : " (out of range)");
  }
  return ok ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------------------

Outcome recall_without_regularity() {
  std::string detail;
  for (auto name : {"uav", "bas"}) {
    FixtureRun run(name, Stage::Analyze);
    auto& ws = *run.ws;
    auto in = run.pipeline->experiment_inputs();
    auto rt = termset_from_json(ws.read_json("extract", "terms_requirements-70.json"));
    auto ho = termset_from_json(ws.read_json("extract", "terms_holdout-30.json"));
    auto sj = ws.read_json("synonyms", "synonyms.json");
    auto pairs = synonyms_from_json(sj);
    auto hpairs = synonyms_from_json(json{{"pairs", sj.at("holdout_pairs")}});
    auto every = all_accepted(pairs, hpairs);
    auto mapping = mapping_from_json(ws.read_json("map", "mapping.json"));
    auto tree = tree_from_json(ws.read_json("ingest", "hierarchy.json"));
    auto gold = gold_step(ho, rt, every, in.model, mapping, in);

    // Keep the gold concepts that name, or are synonyms of, an unmapped class.
    GoldMatcher all(gold, every);
    auto mapped = mapping.mapped_entities();
    std::set<std::string> covered;
    for (auto& e : in.model.entities())
      if (e.category == Category::Classes && !mapped.count(e.iri))
        for (auto& g : all.hits(e.label)) covered.insert(g);
    if (covered.empty()) return fail(fmt::format("{}: no gold concept names a class", name));
    GoldMatcher gm({covered.begin(), covered.end()}, every);

    auto none = recommend(in.model, tree, mapped, Strategy::None);
    auto m = evaluate(none, in.model, gm);
    detail += fmt::format("{}{}: recall {:.2f} over {} of {} gold concepts", detail.empty() ? "" : "; ", name, m.recall,
                          covered.size(), gold.size());
    if (m.recall != 1.0) return fail(detail);

    // The same holds on a model whose every entity is a gold concept.
    std::vector<std::string> labels;
    for (auto& e : in.model.entities())
      if (!mapped.count(e.iri)) labels.push_back(e.label);
    if (evaluate(none, in.model, GoldMatcher(labels, {})).recall != 1.0) return fail(detail + " (full-model gold)");
  }
  return pass(detail);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  std::vector<Criterion> criteria = {
      {"F2 formula conformance", f2_conformance},
      {"AHME arithmetic", ahme_arithmetic},
      {"Gradient check", gradient_check},
      {"Oracle suites", oracle_suites},
      {"Structural safety", structural_safety},
      {"Dataset-conditional reproduction", dataset_conditional},
      {"Without-regularity recall", recall_without_regularity},
  };
  int failures = 0;
  for (auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
    std::cout << fmt::format("{} {}: {} [{:.2f}s]", tag, c.name, o.detail, secs) << std::endl;
    failures += o.kind == Outcome::Fail;
  }
  return failures == 0 ? 0 : 1;
}
