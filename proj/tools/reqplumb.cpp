#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "reqplumb/config.hpp"
#include "reqplumb/pipeline.hpp"
#include "reqplumb/review_server.hpp"

using namespace reqplumb;

namespace {

constexpr int kAwaitingCuration = 3;

struct Common {
  std::string config;
  std::string workspace = "workspace";
  std::vector<std::string> hierarchy_predicates;
  bool reset = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "pipeline configuration (TOML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-w,--workspace", c.workspace, "workspace directory");
  cmd->add_option("--hierarchy-predicate", c.hierarchy_predicates,
                  "hierarchy predicate, e.g. rdfs:subClassOf or hasSubClasses=parent-to-child (repeatable)");
  cmd->add_flag("--reset", c.reset, "discard artifacts built with a different configuration");
  cmd->add_flag("-q,--quiet", c.quiet, "only print warnings and errors");
}

PipelineConfig load(const Common& c) {
  auto cfg = load_config(c.config);
  if (!c.hierarchy_predicates.empty()) {
    cfg.hierarchy_predicates.clear();
    for (auto& p : c.hierarchy_predicates) cfg.hierarchy_predicates.push_back(parse_hierarchy_predicate(p));
  }
  return cfg;
}

Log logger(const Common& c) {
  return [quiet = c.quiet](const std::string& line) {
    if (!quiet || line.find("warning:") != std::string::npos) std::cerr << line << '\n';
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqplumb: requirements to open domain model pipeline"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::pair<Stage, CLI::App*>> stage_cmds;
  for (auto s : kAllStages) {
    auto* cmd = app.add_subcommand(std::string(to_string(s)), fmt::format("run the {} stage", to_string(s)));
    add_common(cmd, common);
    stage_cmds.emplace_back(s, cmd);
  }
  auto* run_all = app.add_subcommand("run-all", "run every stage, skipping those already up to date");
  add_common(run_all, common);

  auto* serve = app.add_subcommand("serve", "serve the review API over a workspace");
  add_common(serve, common);
  int port = 8765;
  std::string host = "127.0.0.1", static_dir;
  serve->add_option("-p,--port", port, "port to listen on");
  serve->add_option("--host", host, "address to bind");
  serve->add_option("--static", static_dir, "directory of review UI assets")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load(common);
    Workspace ws(common.workspace);
    ws.bind(cfg, common.reset);

    if (serve->parsed()) {
      ReviewServer server(ws.root(), curation_dir(cfg, ws), static_dir);
      std::cerr << fmt::format("review API on http://{}:{}/api/status\n", host, port);
      if (!server.listen(host, port)) throw Error(fmt::format("cannot listen on {}:{}", host, port));
      return 0;
    }

    Pipeline pipeline(cfg, ws, logger(common));
    if (run_all->parsed()) {
      auto result = pipeline.run_all();
      if (result.awaiting_curation) {
        std::cerr << "stopped: decisions are pending in the review server\n";
        return kAwaitingCuration;
      }
      if (!common.quiet) std::cout << read_file(ws.root() / "evaluation_report.csv");
      return 0;
    }
    for (auto& [stage, cmd] : stage_cmds) {
      if (!cmd->parsed()) continue;
      auto r = pipeline.run(stage);
      if (!common.quiet)
        for (auto& w : r.written) std::cout << (ws.root() / w).string() << '\n';
      return r.status == "awaiting-curation" ? kAwaitingCuration : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
