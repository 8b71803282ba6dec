#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqplumb/config.hpp"
#include "reqplumb/terms.hpp"

namespace reqplumb {

struct ArtifactRecord {
  std::string path;  // relative to the workspace root
  std::string hash;
};

struct StageRecord {
  std::string stage;
  ArtifactRecord artifact;
  std::vector<ArtifactRecord> extras;
  std::string fingerprint;
  std::string timestamp;
  std::string status = "done";  // or "awaiting-curation"
};

class Workspace {
 public:
  // Creates the directory if needed and loads manifest.json when present.
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path manifest_path() const { return root_ / "manifest.json"; }

  // Binds the workspace to a configuration. A workspace created with a
  // different configuration is refused with a diff unless `reset` is set, in
  // which case every recorded artifact is removed.
  void bind(const PipelineConfig& cfg, bool reset);

  std::optional<std::string> config_hash() const;
  const nlohmann::json& config() const { return config_; }

  const StageRecord* stage(std::string_view name) const;
  const std::map<std::string, StageRecord>& stages() const { return stages_; }
  void record(StageRecord rec);
  void set_status(std::string_view stage, std::string status);

  // Writes atomically and returns the content hash.
  ArtifactRecord write(const std::string& rel, std::string_view content);
  ArtifactRecord write_json(const std::string& rel, const nlohmann::json& j);

  // Reads an artifact produced by `stage`, checking it against the manifest.
  // Missing stages produce "requires <file> (run: <stage>)".
  std::string read(std::string_view stage, const std::string& rel) const;
  nlohmann::json read_json(std::string_view stage, const std::string& rel) const;

  // True when every artifact of the stage exists with its recorded hash.
  bool intact(const StageRecord& rec) const;

  std::size_t artifact_count() const;

 private:
  void save() const;

  std::filesystem::path root_;
  nlohmann::json config_;
  std::map<std::string, StageRecord> stages_;
};

std::string utc_timestamp();

// Decisions written by the review server and read by the pipeline. Writes are
// serialized, atomic and appended to an audit log; the last write wins.
class CurationStore {
 public:
  explicit CurationStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file(std::string_view kind) const;  // kind: "terms" or "synonyms"

  Decisions load(std::string_view kind) const;
  void decide(std::string_view kind, const std::string& id, Status decision, const std::string& reviewer = {});
  std::vector<nlohmann::json> audit() const;
  // Hash of the decision file content, empty string when absent.
  std::string hash(std::string_view kind) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace reqplumb
