#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/domain_model.hpp"
#include "reqplumb/experiment.hpp"
#include "reqplumb/recommend.hpp"
#include "reqplumb/requirements.hpp"

namespace reqplumb {

enum class CurationMode { Batch, Interactive };

struct PipelineConfig {
  std::filesystem::path source;  // the TOML file, empty for in-memory configs

  struct Paths {
    std::filesystem::path model;
    std::filesystem::path requirements;
    std::filesystem::path corpus;
    std::filesystem::path pos_lexicon;
    std::filesystem::path stopwords;
    std::filesystem::path synonym_lexicon;
    std::filesystem::path curation;  // empty: <workspace>/curation
    std::filesystem::path gold;      // optional curated gold term list
  } paths;

  std::optional<rdf::Syntax> model_syntax;
  RequirementFormat requirements_format = RequirementFormat::Auto;
  std::vector<HierarchyPredicate> hierarchy_predicates = default_hierarchy_predicates();
  ExperimentConfig experiment;
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  CurationMode curation_mode = CurationMode::Batch;
  std::string review_server = "http://127.0.0.1:8765";

  // Canonical form used for hashing and diffs; paths are absolute.
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Relative paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view toml, const std::filesystem::path& base_dir,
                            std::string_view origin = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

// Throws listing every missing input.
void validate_paths(const PipelineConfig& cfg);

// "key: old -> new" lines for every differing leaf.
std::vector<std::string> config_diff(const nlohmann::json& before, const nlohmann::json& after);

}  // namespace reqplumb
