#include <doctest.h>

#include <thread>

#include "reqplumb/config.hpp"
#include "reqplumb/pipeline.hpp"
#include "reqplumb/review_server.hpp"
#include "support.hpp"

// resolv.h, pulled in here, defines _res; keep it after Eigen.
#include <httplib.h>

using namespace reqplumb;
using nlohmann::json;

namespace {

class Running {
 public:
  Running(const std::filesystem::path& ws, const std::filesystem::path& curation) : server_(ws, curation) {
    port_ = server_.bind_any();
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Running() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  ReviewServer server_;
  int port_ = 0;
  std::thread thread_;
};

json body(const httplib::Result& r) { return json::parse(r->body); }

httplib::Result post(httplib::Client& c, const std::string& path, const json& j) {
  return c.Post(path, j.dump(), "application/json");
}

}  // namespace

TEST_CASE("review API over a UAV workspace") {
  testing::TempDir tmp;
  testing::copy_curation("uav", tmp / "curation");
  auto cfg = parse_config(
      testing::fixture_config("uav", tmp / "curation", "[joint]\ndim = 16\nepochs = 20\n[experiment]\nn_runs = 1\n"),
      tmp.path());
  Workspace ws(tmp / "ws");
  ws.bind(cfg, false);
  Running server(tmp / "ws", tmp / "curation");
  auto c = server.client();

  auto status = c.Get("/api/status");
  REQUIRE(status);
  CHECK(status->status == 200);
  CHECK(status->get_header_value("X-Config-Hash") == cfg.hash());
  CHECK(body(status).at("config_hash") == cfg.hash());
  CHECK(body(status).at("stages").empty());

  auto fam = c.Get("/api/families");
  REQUIRE(fam);
  CHECK(fam->status == 409);
  CHECK(body(fam).at("stage") == "analyze");
  CHECK(c.Get("/api/terms")->status == 409);

  Pipeline p(cfg, ws);
  for (auto s : {Stage::Ingest, Stage::Extract, Stage::Synonyms}) p.run(s);

  auto terms = c.Get("/api/terms");
  REQUIRE(terms->status == 200);
  auto tj = body(terms);
  CHECK(tj.at("threshold") == 1.0);
  bool seen_rejected = false;
  for (auto& t : tj.at("terms"))
    if (t.at("id") == "cycles") {
      seen_rejected = true;
      CHECK(t.at("decision") == "Rejected");
    }
  CHECK(seen_rejected);
  auto first = tj.at("terms")[0];
  std::string id = first.at("id");

  SUBCASE("term decisions persist with an audit trail") {
    auto before_audit = p.curation().audit().size();
    auto r1 = post(c, "/api/terms/" + id + "/decision", {{"decision", "Accepted"}, {"reviewer", "ana"}});
    REQUIRE(r1->status == 200);
    CHECK(body(r1).at("decision") == "Accepted");
    auto r2 = post(c, "/api/terms/" + id + "/decision", {{"decision", "Rejected"}, {"reviewer", "ben"}});
    REQUIRE(r2->status == 200);
    CHECK(body(r2).at("previous") == "Accepted");

    CurationStore store(tmp / "curation");
    CHECK(store.load("terms").at(id) == Status::Rejected);
    auto audit = store.audit();
    REQUIRE(audit.size() == before_audit + 2);
    CHECK(audit[audit.size() - 2].at("reviewer") == "ana");
    CHECK(audit.back().at("reviewer") == "ben");

    for (auto& t : body(c.Get("/api/terms")).at("terms"))
      if (t.at("id") == id) CHECK(t.at("decision") == "Rejected");
  }

  SUBCASE("bad requests") {
    CHECK(post(c, "/api/terms/" + id + "/decision", {{"decision", "Maybe"}})->status == 400);
    CHECK(c.Post("/api/terms/" + id + "/decision", "not json", "application/json")->status == 400);
    CHECK(post(c, "/api/terms/no_such_term/decision", {{"decision", "Accepted"}})->status == 404);
  }

  SUBCASE("synonym decisions") {
    auto syn = body(c.Get("/api/synonyms"));
    REQUIRE_FALSE(syn.at("pairs").empty());
    std::string pid;
    for (auto& s : syn.at("pairs"))
      if (s.at("rule") == "EmbeddingOnly") pid = s.at("id");
    REQUIRE_FALSE(pid.empty());
    auto r = post(c, "/api/synonyms/" + httplib::detail::encode_url(pid) + "/decision", {{"decision", "Accepted"}});
    REQUIRE(r->status == 200);
    CHECK(body(r).at("id") == pid);
    CHECK(CurationStore(tmp / "curation").load("synonyms").at(pid) == Status::Accepted);
    auto st = body(c.Get("/api/status"));
    CHECK(st.at("decisions").at("synonyms") == 1);
  }

  SUBCASE("tree and families after analysis") {
    auto tree = body(c.Get("/api/tree"));
    CHECK(tree.at("families_available") == false);
    CHECK(tree.at("roots").size() == 1);
    for (auto s : {Stage::Map, Stage::Embed, Stage::Complete, Stage::Analyze}) p.run(s);
    auto f = c.Get("/api/families");
    REQUIRE(f->status == 200);
    auto fj = body(f);
    fj.erase("config_hash");
    CHECK(fj == Workspace(tmp / "ws").read_json("analyze", "families.json"));
    tree = body(c.Get("/api/tree"));
    CHECK(tree.at("families_available") == true);
    std::size_t roots = 0, mapped = 0;
    for (auto& n : tree.at("nodes")) {
      roots += n.at("family_root").get<bool>();
      mapped += n.at("mapped").get<bool>();
    }
    CHECK(roots == fj.at("roots").size());
    CHECK(mapped > 0);
  }
}
