#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reqplumb/config.hpp"
#include "reqplumb/experiment.hpp"
#include "reqplumb/workspace.hpp"

namespace reqplumb {

enum class Stage { Ingest, Extract, Synonyms, Map, Embed, Complete, Analyze, Recommend, Evaluate };

constexpr Stage kAllStages[] = {Stage::Ingest,   Stage::Extract, Stage::Synonyms,  Stage::Map,     Stage::Embed,
                                Stage::Complete, Stage::Analyze, Stage::Recommend, Stage::Evaluate};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

// Primary artifact file name of a stage.
std::string primary_artifact(Stage s, const PipelineConfig& cfg);

struct StageResult {
  Stage stage;
  bool skipped = false;  // fingerprint matched, nothing written
  std::string status = "done";
  std::vector<std::string> written;
  std::vector<std::string> warnings;
};

using Log = std::function<void(const std::string&)>;

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, Workspace& ws, Log log = {});

  const PipelineConfig& config() const { return cfg_; }
  CurationStore& curation() { return curation_; }

  StageResult run(Stage stage);

  struct RunAll {
    std::vector<StageResult> stages;
    bool awaiting_curation = false;
    std::optional<ExperimentReport> report;
  };
  // Stops early with awaiting_curation in interactive mode while decisions are pending.
  RunAll run_all();

  // Inputs shared by every run, rebuilt from workspace artifacts.
  ExperimentInputs experiment_inputs() const;

 private:
  std::string fingerprint(Stage stage) const;
  StageResult execute(Stage stage);
  void check_server() const;

  StageResult ingest();
  StageResult extract();
  StageResult synonyms();
  StageResult map();
  StageResult embed();
  StageResult complete();
  StageResult analyze();
  StageResult recommend();
  StageResult evaluate();

  PipelineConfig cfg_;
  Workspace& ws_;
  CurationStore curation_;
  Log log_;
};

std::filesystem::path curation_dir(const PipelineConfig& cfg, const Workspace& ws);

}  // namespace reqplumb
