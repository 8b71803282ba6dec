#include <doctest.h>

#include "reqplumb/config.hpp"
#include "reqplumb/pipeline.hpp"
#include "support.hpp"

using namespace reqplumb;
using nlohmann::json;

namespace {

const char* kFast = "[joint]\ndim = 16\nepochs = 40\n[experiment]\nn_runs = 1\n";

PipelineConfig fixture_cfg(const testing::TempDir& tmp, const std::string& extra = kFast) {
  testing::copy_curation("uav", tmp / "curation");
  return parse_config(testing::fixture_config("uav", tmp / "curation", extra), tmp.path());
}

}  // namespace

TEST_CASE("unknown configuration keys are errors") {
  testing::TempDir tmp;
  CHECK_THROWS_WITH_AS(parse_config("[paths]\nmodle = \"x\"\n", tmp.path()), doctest::Contains("modle"), Error);
  CHECK_THROWS_WITH_AS(parse_config("[pathz]\n", tmp.path()), doctest::Contains("pathz"), Error);
  CHECK_THROWS_AS(parse_config("[split]\nratio = \"high\"\n", tmp.path()), Error);
  CHECK_THROWS_AS(parse_config("[families]\nrule = \"best(2)\"\n", tmp.path()), Error);
}

TEST_CASE("config hash follows content") {
  testing::TempDir tmp;
  auto a = fixture_cfg(tmp);
  auto b = fixture_cfg(tmp);
  CHECK(a.hash() == b.hash());
  auto c = fixture_cfg(tmp, "[joint]\ndim = 16\nepochs = 41\n[experiment]\nn_runs = 1\n");
  CHECK(a.hash() != c.hash());
  auto diff = config_diff(a.to_json(), c.to_json());
  REQUIRE(diff.size() == 1);
  CHECK(diff[0].find("epochs") != std::string::npos);
}

TEST_CASE("missing upstream artifacts name the stage to run") {
  testing::TempDir tmp;
  auto cfg = fixture_cfg(tmp);
  Workspace ws(tmp / "ws");
  ws.bind(cfg, false);
  Pipeline p(cfg, ws);
  CHECK_THROWS_WITH_AS(p.run(Stage::Map), doctest::Contains("(run: ingest)"), Error);
  p.run(Stage::Ingest);
  CHECK_THROWS_WITH_AS(p.run(Stage::Map), doctest::Contains("requires"), Error);
  CHECK_THROWS_WITH_AS(p.run(Stage::Map), doctest::Contains("(run: extract)"), Error);
}

TEST_CASE("a workspace refuses a different configuration unless reset") {
  testing::TempDir tmp;
  auto cfg = fixture_cfg(tmp);
  {
    Workspace ws(tmp / "ws");
    ws.bind(cfg, false);
    Pipeline(cfg, ws).run(Stage::Ingest);
  }
  auto other = fixture_cfg(tmp, "[joint]\ndim = 8\nepochs = 40\n[experiment]\nn_runs = 1\n");
  Workspace ws(tmp / "ws");
  CHECK(ws.stage("ingest"));
  CHECK_THROWS_WITH_AS(ws.bind(other, false), doctest::Contains("joint/dim: 16 -> 8"), Error);
  CHECK(ws.stage("ingest"));
  ws.bind(other, true);
  CHECK_FALSE(ws.stage("ingest"));
  CHECK_FALSE(std::filesystem::exists(tmp / "ws" / "model.json"));
}

TEST_CASE("full pipeline on the UAV fixture") {
  testing::TempDir tmp;
  auto cfg = fixture_cfg(tmp);
  Workspace ws(tmp / "ws");
  ws.bind(cfg, false);
  Pipeline p(cfg, ws);
  auto all = p.run_all();
  CHECK_FALSE(all.awaiting_curation);
  REQUIRE(all.stages.size() == 9);
  for (auto& s : all.stages) CHECK_FALSE(s.skipped);

  Workspace reopened(tmp / "ws");
  CHECK(reopened.stages().size() == 9);
  for (auto& [name, rec] : reopened.stages()) {
    INFO(name);
    CHECK(reopened.intact(rec));
    CHECK(rec.status == "done");
  }
  for (auto s : kAllStages) CHECK(std::filesystem::exists(tmp / "ws" / primary_artifact(s, cfg)));

  SUBCASE("a second run does nothing") {
    auto before = read_file(tmp / "ws" / "manifest.json");
    Pipeline again(cfg, reopened);
    auto r = again.run_all();
    for (auto& s : r.stages) CHECK(s.skipped);
    CHECK(read_file(tmp / "ws" / "manifest.json") == before);
  }

  SUBCASE("a single-run report matches a direct run") {
    auto report = reopened.read_json("evaluate", "evaluation_report.json");
    REQUIRE(report.at("runs").size() == 1);
    auto direct = to_json(run_once(p.experiment_inputs(), cfg.experiment, 0));
    auto stored = report.at("runs")[0];
    CHECK(stored.at("ok") == true);
    for (auto key : {"gold", "mapping_rate", "completed_mapping_rate", "added_links", "families", "original",
                     "completed"}) {
      INFO(key);
      CHECK(stored.at(key) == direct.at(key));
    }
  }

  SUBCASE("a new decision reruns extraction and everything after it") {
    Pipeline again(cfg, reopened);
    again.curation().decide("terms", "flight_plan", Status::Rejected, "test");
    auto r = again.run(Stage::Extract);
    CHECK_FALSE(r.skipped);
    auto terms = termset_from_json(reopened.read_json("extract", "terms_requirements-70.json"));
    CHECK_FALSE(terms.contains("flight plan"));
    CHECK(again.run(Stage::Ingest).skipped);
    CHECK_FALSE(again.run(Stage::Synonyms).skipped);
  }
}

TEST_CASE("interactive mode stops for pending decisions") {
  testing::TempDir tmp;
  auto cfg = fixture_cfg(tmp, std::string(kFast) + "[curation]\nmode = \"interactive\"\nserver = \"http://127.0.0.1:1\"\n");
  Workspace ws(tmp / "ws");
  ws.bind(cfg, false);
  Pipeline p(cfg, ws);
  CHECK_THROWS_WITH_AS(p.run_all(), doctest::Contains("review server"), Error);
  p.run(Stage::Ingest);
  auto r = p.run(Stage::Extract);
  CHECK(r.status == "awaiting-curation");
  CHECK(ws.stage("extract")->status == "awaiting-curation");
}
