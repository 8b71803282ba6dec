#include "reqplumb/review_server.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "reqplumb/common.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/mapping.hpp"
#include "reqplumb/regularity.hpp"
#include "reqplumb/synonyms.hpp"

namespace reqplumb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kTermsFile = "terms_requirements-70.json";

// Raised inside a handler to produce a JSON error response.
struct HttpError {
  int status;
  std::string message;
  std::string stage;
};

void reply(httplib::Response& res, int status, json body, const std::string& hash) {
  if (body.is_object()) body["config_hash"] = hash;
  res.status = status;
  res.set_header("X-Config-Hash", hash);
  res.set_content(body.dump(), "application/json");
}

json need(const Workspace& ws, const char* stage, const char* file) {
  auto* rec = ws.stage(stage);
  if (!rec) throw HttpError{409, fmt::format("requires {} (run: {})", file, stage), stage};
  try {
    return ws.read_json(stage, file);
  } catch (const Error& e) {
    throw HttpError{409, e.what(), stage};
  }
}

json decision_json(const Decisions& d, const std::string& id) {
  auto it = d.find(id);
  return it == d.end() ? json(nullptr) : json(to_string(it->second));
}

std::vector<TermCandidate> all_candidates(const json& terms) {
  auto set = termset_from_json(terms);
  auto out = set.terms;
  out.insert(out.end(), set.rejected.begin(), set.rejected.end());
  return out;
}

}  // namespace

ReviewServer::ReviewServer(fs::path workspace, fs::path curation_dir, fs::path static_dir)
    : workspace_(std::move(workspace)),
      store_(std::move(curation_dir)),
      static_dir_(std::move(static_dir)),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }
bool ReviewServer::listen_after_bind() { return server_->listen_after_bind(); }
bool ReviewServer::listen(const std::string& host, int port) { return server_->listen(host, port); }
void ReviewServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}
void ReviewServer::wait_until_ready() const { server_->wait_until_ready(); }

void ReviewServer::routes() {
  auto handle = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      Workspace ws(workspace_);
      auto hash = ws.config_hash().value_or("");
      try {
        reply(res, 200, fn(ws, req), hash);
      } catch (const HttpError& e) {
        json body = {{"error", e.message}};
        if (!e.stage.empty()) body["stage"] = e.stage;
        reply(res, e.status, body, hash);
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}}, hash);
      }
    };
  };

  auto decide = [this](std::string_view kind, const std::string& id, const httplib::Request& req) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      throw HttpError{400, "request body must be JSON", {}};
    }
    auto status = body.is_object() && body.contains("decision") && body["decision"].is_string()
                      ? parse_status(body["decision"].get<std::string>())
                      : std::nullopt;
    if (!status || *status == Status::Auto) throw HttpError{400, "decision must be \"Accepted\" or \"Rejected\"", {}};
    auto reviewer = body.value("reviewer", std::string{});
    auto previous = decision_json(store_.load(kind), id);
    store_.decide(kind, id, *status, reviewer);
    return json{{"id", id}, {"decision", to_string(*status)}, {"previous", previous}};
  };

  server_->Get("/api/status", handle([this](Workspace& ws, const httplib::Request&) {
    json stages = json::object();
    for (auto& [name, s] : ws.stages())
      stages[name] = {{"status", s.status}, {"timestamp", s.timestamp}, {"artifact", s.artifact.path}};
    auto terms = store_.load("terms");
    auto syns = store_.load("synonyms");
    json pending = json::object();
    if (ws.stage("extract")) {
      std::size_t n = 0;
      for (auto& c : termset_from_json(ws.read_json("extract", kTermsFile)).terms)
        if (c.status == Status::Auto && !terms.count(c.id())) ++n;
      pending["terms"] = n;
    }
    if (ws.stage("synonyms")) {
      std::size_t n = 0;
      for (auto& p : synonyms_from_json(ws.read_json("synonyms", "synonyms.json")))
        if (p.rule == SynRule::EmbeddingOnly && p.status == Status::Auto && !syns.count(p.id())) ++n;
      pending["synonyms"] = n;
    }
    return json{{"workspace", ws.root().string()},
                {"stages", stages},
                {"decisions", {{"terms", terms.size()}, {"synonyms", syns.size()}}},
                {"pending", pending}};
  }));

  server_->Get("/api/terms", handle([this](Workspace& ws, const httplib::Request&) {
    auto j = need(ws, "extract", kTermsFile);
    auto decisions = store_.load("terms");
    json items = json::array();
    for (auto& c : all_candidates(j)) {
      auto item = to_json(c);
      item["id"] = c.id();
      item["text"] = c.text();
      item["decision"] = decision_json(decisions, c.id());
      items.push_back(item);
    }
    return json{{"threshold", j.at("threshold")}, {"terms", items}};
  }));

  server_->Post(R"(/api/terms/([^/]+)/decision)", handle([this, decide](Workspace& ws, const httplib::Request& req) {
    std::string id = req.matches[1];
    auto j = need(ws, "extract", kTermsFile);
    auto cands = all_candidates(j);
    if (std::none_of(cands.begin(), cands.end(), [&](auto& c) { return c.id() == id; }))
      throw HttpError{404, fmt::format("unknown term '{}'", id), {}};
    return decide("terms", id, req);
  }));

  server_->Get("/api/synonyms", handle([this](Workspace& ws, const httplib::Request&) {
    auto j = need(ws, "synonyms", "synonyms.json");
    auto decisions = store_.load("synonyms");
    json items = json::array();
    for (auto& p : synonyms_from_json(j)) {
      auto item = to_json(p);
      item["id"] = p.id();
      item["decision"] = decision_json(decisions, p.id());
      items.push_back(item);
    }
    return json{{"threshold", j.at("sim_threshold")}, {"pairs", items}};
  }));

  server_->Post(R"(/api/synonyms/([^/]+)/decision)",
                handle([this, decide](Workspace& ws, const httplib::Request& req) {
                  std::string id = req.matches[1];
                  auto pairs = synonyms_from_json(need(ws, "synonyms", "synonyms.json"));
                  if (std::none_of(pairs.begin(), pairs.end(), [&](auto& p) { return p.id() == id; }))
                    throw HttpError{404, fmt::format("unknown synonym pair '{}'", id), {}};
                  return decide("synonyms", id, req);
                }));

  server_->Get("/api/families", handle([](Workspace& ws, const httplib::Request&) {
    return need(ws, "analyze", "families.json");
  }));

  server_->Get("/api/tree", handle([](Workspace& ws, const httplib::Request&) {
    auto model = model_from_json(need(ws, "ingest", "model.json"));
    auto tree = tree_from_json(need(ws, "ingest", "hierarchy.json"));
    std::set<std::string> mapped, roots, scope;
    if (ws.stage("map"))
      for (auto& e : mapping_from_json(ws.read_json("map", "mapping.json")).mapped_entities()) mapped.insert(e);
    if (ws.stage("analyze")) {
      auto f = families_from_json(ws.read_json("analyze", "families.json"));
      for (auto& r : f.roots) roots.insert(r.node);
      scope = f.scope;
    }
    json nodes = json::array();
    for (auto& [iri, level] : tree.level) {
      auto* e = model.find(iri);
      auto parent = tree.parent_of.find(iri);
      nodes.push_back({{"iri", iri},
                       {"label", e ? e->label : std::string{}},
                       {"level", level},
                       {"position", to_string(tree.position.at(iri))},
                       {"parent", parent == tree.parent_of.end() ? json(nullptr) : json(parent->second)},
                       {"mapped", mapped.count(iri) > 0},
                       {"family_root", roots.count(iri) > 0},
                       {"in_family", scope.count(iri) > 0}});
    }
    return json{{"roots", tree.roots}, {"nodes", nodes}, {"families_available", ws.stage("analyze") != nullptr}};
  }));

  if (!static_dir_.empty() && fs::is_directory(static_dir_)) server_->set_mount_point("/", static_dir_.string());
}

}  // namespace reqplumb
