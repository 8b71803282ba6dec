#include "reqplumb/workspace.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "reqplumb/common.hpp"

namespace reqplumb {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

nlohmann::json record_json(const ArtifactRecord& a) { return {{"path", a.path}, {"hash", a.hash}}; }
ArtifactRecord record_from(const nlohmann::json& j) { return {j.at("path"), j.at("hash")}; }

}  // namespace

Workspace::Workspace(fs::path root) : root_(fs::absolute(std::move(root))) {
  fs::create_directories(root_);
  if (!fs::exists(manifest_path())) return;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{} is not valid JSON: {}", manifest_path().string(), e.what()));
  }
  config_ = m.value("config", nlohmann::json());
  for (auto& [name, s] : m.at("stages").items()) {
    StageRecord r;
    r.stage = name;
    r.artifact = record_from(s.at("artifact"));
    for (auto& e : s.value("extras", nlohmann::json::array())) r.extras.push_back(record_from(e));
    r.fingerprint = s.at("fingerprint");
    r.timestamp = s.value("timestamp", "");
    r.status = s.value("status", "done");
    stages_[name] = std::move(r);
  }
}

void Workspace::bind(const PipelineConfig& cfg, bool reset) {
  auto j = cfg.to_json();
  if (!config_.is_null() && config_ != j) {
    if (!reset) {
      std::string msg = fmt::format("workspace {} was created with a different configuration:", root_.string());
      for (auto& line : config_diff(config_, j)) msg += "\n  " + line;
      msg += "\nrerun with --reset to discard its artifacts";
      throw Error(msg);
    }
    for (auto& [name, s] : stages_) {
      fs::remove(root_ / s.artifact.path);
      for (auto& e : s.extras) fs::remove(root_ / e.path);
    }
    stages_.clear();
  }
  config_ = std::move(j);
  save();
}

std::optional<std::string> Workspace::config_hash() const {
  if (config_.is_null()) return std::nullopt;
  return sha256_hex(config_.dump());
}

const StageRecord* Workspace::stage(std::string_view name) const {
  auto it = stages_.find(std::string(name));
  return it == stages_.end() ? nullptr : &it->second;
}

void Workspace::record(StageRecord rec) {
  if (rec.timestamp.empty()) rec.timestamp = utc_timestamp();
  stages_[rec.stage] = std::move(rec);
  save();
}

void Workspace::set_status(std::string_view stage, std::string status) {
  auto it = stages_.find(std::string(stage));
  if (it == stages_.end()) return;
  it->second.status = std::move(status);
  save();
}

ArtifactRecord Workspace::write(const std::string& rel, std::string_view content) {
  write_file_atomic(root_ / rel, content);
  return {rel, sha256_hex(content)};
}

ArtifactRecord Workspace::write_json(const std::string& rel, const nlohmann::json& j) { return write(rel, j.dump(2) + "\n"); }

std::string Workspace::read(std::string_view stage, const std::string& rel) const {
  auto* rec = this->stage(stage);
  if (!rec) throw Error(fmt::format("requires {} (run: {})", rel, stage));
  const ArtifactRecord* art = rec->artifact.path == rel ? &rec->artifact : nullptr;
  for (auto& e : rec->extras)
    if (e.path == rel) art = &e;
  if (!art) throw Error(fmt::format("requires {} (run: {})", rel, stage));
  if (!fs::exists(root_ / rel)) throw Error(fmt::format("requires {} (run: {}); the file is missing", rel, stage));
  auto content = read_file(root_ / rel);
  if (sha256_hex(content) != art->hash)
    throw Error(fmt::format("{} does not match its manifest hash; rerun stage {}", rel, stage));
  return content;
}

nlohmann::json Workspace::read_json(std::string_view stage, const std::string& rel) const {
  auto content = read(stage, rel);
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: {}", rel, e.what()));
  }
}

bool Workspace::intact(const StageRecord& rec) const {
  auto ok = [&](const ArtifactRecord& a) {
    auto p = root_ / a.path;
    return fs::exists(p) && sha256_hex(read_file(p)) == a.hash;
  };
  if (!ok(rec.artifact)) return false;
  for (auto& e : rec.extras)
    if (!ok(e)) return false;
  return true;
}

std::size_t Workspace::artifact_count() const { return stages_.size(); }

void Workspace::save() const {
  nlohmann::json stages = nlohmann::json::object();
  for (auto& [name, r] : stages_) {
    nlohmann::json extras = nlohmann::json::array();
    for (auto& e : r.extras) extras.push_back(record_json(e));
    stages[name] = {{"artifact", record_json(r.artifact)},
                    {"extras", extras},
                    {"fingerprint", r.fingerprint},
                    {"timestamp", r.timestamp},
                    {"status", r.status}};
  }
  nlohmann::json m = {{"schema", kSchemaVersion}, {"config_hash", config_hash().value_or("")}, {"config", config_},
                      {"stages", stages}};
  write_file_atomic(manifest_path(), m.dump(2) + "\n");
}

CurationStore::CurationStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path CurationStore::file(std::string_view kind) const { return dir_ / fmt::format("{}.json", kind); }

Decisions CurationStore::load(std::string_view kind) const {
  std::lock_guard lock(mu_);
  auto p = file(kind);
  if (!fs::exists(p)) return {};
  try {
    return decisions_from_json(nlohmann::json::parse(read_file(p)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: {}", p.string(), e.what()));
  }
}

void CurationStore::decide(std::string_view kind, const std::string& id, Status decision, const std::string& reviewer) {
  if (kind != "terms" && kind != "synonyms") throw Error(fmt::format("unknown curation kind '{}'", kind));
  if (decision == Status::Auto) throw Error("a decision must be Accepted or Rejected");
  std::lock_guard lock(mu_);
  fs::create_directories(dir_);
  auto p = file(kind);
  Decisions d;
  if (fs::exists(p)) d = decisions_from_json(nlohmann::json::parse(read_file(p)));
  std::optional<Status> previous;
  if (auto it = d.find(id); it != d.end()) previous = it->second;
  d[id] = decision;
  write_file_atomic(p, to_json(d).dump(2) + "\n");
  nlohmann::json entry = {{"time", utc_timestamp()},
                          {"kind", kind},
                          {"id", id},
                          {"decision", to_string(decision)},
                          {"previous", previous ? nlohmann::json(to_string(*previous)) : nlohmann::json(nullptr)}};
  if (!reviewer.empty()) entry["reviewer"] = reviewer;
  std::ofstream audit(dir_ / "audit.jsonl", std::ios::app);
  audit << entry.dump() << '\n';
}

std::vector<nlohmann::json> CurationStore::audit() const {
  std::lock_guard lock(mu_);
  std::vector<nlohmann::json> out;
  auto p = dir_ / "audit.jsonl";
  if (!fs::exists(p)) return out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::string CurationStore::hash(std::string_view kind) const {
  std::lock_guard lock(mu_);
  auto p = file(kind);
  return fs::exists(p) ? sha256_hex(read_file(p)) : std::string{};
}

}  // namespace reqplumb
