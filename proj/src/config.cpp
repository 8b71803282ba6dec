#include "reqplumb/config.hpp"

#include <set>

#include <fmt/format.h>
#include <toml.hpp>

#include "reqplumb/common.hpp"

namespace reqplumb {

namespace fs = std::filesystem;

namespace {

class Reader {
 public:
  Reader(const toml::table& root, fs::path base, std::string origin)
      : root_(root), base_(std::move(base)), origin_(std::move(origin)) {}

  const toml::table* table(std::string_view name, std::initializer_list<std::string_view> allowed) {
    auto* node = root_.get(name);
    if (!node) return nullptr;
    auto* t = node->as_table();
    if (!t) fail(name, "must be a table");
    std::set<std::string_view> ok(allowed);
    for (auto& [k, v] : *t)
      if (!ok.count(k.str())) fail(fmt::format("{}.{}", name, k.str()), "is not a known setting");
    return t;
  }

  template <class T>
  std::optional<T> get(const toml::table* t, std::string_view section, std::string_view key) {
    if (!t) return std::nullopt;
    auto* node = t->get(key);
    if (!node) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = node->value<double>()) return *v;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (node->is_boolean()) return node->as_boolean()->get();
    } else if constexpr (std::is_integral_v<T>) {
      if (auto v = node->value<std::int64_t>()) {
        if (*v < 0 && std::is_unsigned_v<T>) fail(fmt::format("{}.{}", section, key), "must not be negative");
        return static_cast<T>(*v);
      }
    } else {
      if (auto v = node->value<std::string>()) return *v;
    }
    fail(fmt::format("{}.{}", section, key), "has the wrong type");
  }

  std::optional<std::vector<std::string>> strings(const toml::table* t, std::string_view section, std::string_view key) {
    if (!t) return std::nullopt;
    auto* node = t->get(key);
    if (!node) return std::nullopt;
    auto* arr = node->as_array();
    if (!arr) fail(fmt::format("{}.{}", section, key), "must be an array of strings");
    std::vector<std::string> out;
    for (auto& el : *arr) {
      auto v = el.value<std::string>();
      if (!v) fail(fmt::format("{}.{}", section, key), "must be an array of strings");
      out.push_back(*v);
    }
    return out;
  }

  fs::path path(const toml::table* t, std::string_view key) {
    auto v = get<std::string>(t, "paths", key);
    if (!v || v->empty()) return {};
    fs::path p(*v);
    return (p.is_absolute() ? p : base_ / p).lexically_normal();
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) {
    throw Error(fmt::format("{}: {} {}", origin_, key, what));
  }

 private:
  const toml::table& root_;
  fs::path base_;
  std::string origin_;
};

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir, std::string_view origin) {
  toml::table root;
  try {
    root = toml::parse(text, std::string(origin));
  } catch (const toml::parse_error& e) {
    throw Error(fmt::format("{}:{}:{}: {}", origin, e.source().begin.line, e.source().begin.column, e.description()));
  }
  for (auto& [k, v] : root) {
    static const std::set<std::string_view> sections{"paths", "model", "split", "terms", "synonyms", "word_embeddings",
                                                     "joint", "completion", "families", "recommend", "experiment",
                                                     "curation"};
    if (!sections.count(k.str())) throw Error(fmt::format("{}: unknown section [{}]", origin, k.str()));
  }

  Reader r(root, fs::absolute(base_dir), std::string(origin));
  PipelineConfig cfg;
  auto* paths = r.table("paths", {"model", "requirements", "corpus", "pos_lexicon", "stopwords", "synonym_lexicon",
                                  "curation", "gold"});
  cfg.paths.model = r.path(paths, "model");
  cfg.paths.requirements = r.path(paths, "requirements");
  cfg.paths.corpus = r.path(paths, "corpus");
  cfg.paths.pos_lexicon = r.path(paths, "pos_lexicon");
  cfg.paths.stopwords = r.path(paths, "stopwords");
  cfg.paths.synonym_lexicon = r.path(paths, "synonym_lexicon");
  cfg.paths.curation = r.path(paths, "curation");
  cfg.paths.gold = r.path(paths, "gold");

  auto* model = r.table("model", {"syntax", "hierarchy_predicates", "restrict", "requirements_format"});
  if (auto s = r.get<std::string>(model, "model", "syntax")) {
    cfg.model_syntax = rdf::parse_syntax(*s);
    if (!cfg.model_syntax) r.fail("model.syntax", "must be turtle or rdf-xml");
  }
  if (auto preds = r.strings(model, "model", "hierarchy_predicates")) {
    cfg.hierarchy_predicates.clear();
    for (auto& p : *preds) cfg.hierarchy_predicates.push_back(parse_hierarchy_predicate(p));
  }
  if (auto s = r.get<std::string>(model, "model", "restrict")) {
    if (*s == "none" || s->empty()) cfg.experiment.restrict_to.reset();
    else if (auto c = parse_category(*s)) cfg.experiment.restrict_to = *c;
    else r.fail("model.restrict", "must be a category name or \"none\"");
  }
  if (auto s = r.get<std::string>(model, "model", "requirements_format")) {
    auto f = parse_requirement_format(*s);
    if (!f) r.fail("model.requirements_format", "must be auto, one-per-line or numbered-list");
    cfg.requirements_format = *f;
  }

  auto& ex = cfg.experiment;
  auto* split = r.table("split", {"ratio", "seed", "run_index"});
  ex.split.ratio = r.get<double>(split, "split", "ratio").value_or(ex.split.ratio);
  ex.split.seed = r.get<std::uint64_t>(split, "split", "seed").value_or(ex.split.seed);
  ex.split.run_index = r.get<std::uint64_t>(split, "split", "run_index").value_or(ex.split.run_index);

  auto* terms = r.table("terms", {"threshold"});
  ex.cvalue_threshold = r.get<double>(terms, "terms", "threshold").value_or(ex.cvalue_threshold);

  auto* syn = r.table("synonyms", {"sim_threshold"});
  ex.synonyms.sim_threshold = r.get<double>(syn, "synonyms", "sim_threshold").value_or(ex.synonyms.sim_threshold);

  auto* we = r.table("word_embeddings", {"dim", "window", "min_count", "epochs", "negative", "learning_rate", "seed"});
  ex.words.dim = r.get<int>(we, "word_embeddings", "dim").value_or(ex.words.dim);
  ex.words.window = r.get<int>(we, "word_embeddings", "window").value_or(ex.words.window);
  ex.words.min_count = r.get<std::size_t>(we, "word_embeddings", "min_count").value_or(ex.words.min_count);
  ex.words.epochs = r.get<int>(we, "word_embeddings", "epochs").value_or(ex.words.epochs);
  ex.words.negative = r.get<int>(we, "word_embeddings", "negative").value_or(ex.words.negative);
  ex.words.learning_rate = r.get<double>(we, "word_embeddings", "learning_rate").value_or(ex.words.learning_rate);
  ex.words.seed = r.get<std::uint64_t>(we, "word_embeddings", "seed").value_or(ex.words.seed);

  auto* jt = r.table("joint", {"dim", "epochs", "learning_rate", "batch_size", "seed", "bias", "softmax", "sample_k",
                               "integer_init"});
  ex.joint.dim = r.get<int>(jt, "joint", "dim").value_or(ex.joint.dim);
  ex.joint.epochs = r.get<int>(jt, "joint", "epochs").value_or(ex.joint.epochs);
  ex.joint.learning_rate = r.get<double>(jt, "joint", "learning_rate").value_or(ex.joint.learning_rate);
  ex.joint.batch_size = r.get<std::size_t>(jt, "joint", "batch_size").value_or(ex.joint.batch_size);
  ex.joint.seed = r.get<std::uint64_t>(jt, "joint", "seed").value_or(ex.joint.seed);
  ex.joint.bias = r.get<double>(jt, "joint", "bias").value_or(ex.joint.bias);
  if (auto s = r.get<std::string>(jt, "joint", "softmax")) {
    if (*s == "full") ex.joint.softmax = SoftmaxMode::Full;
    else if (*s == "sampled") ex.joint.softmax = SoftmaxMode::Sampled;
    else r.fail("joint.softmax", "must be full or sampled");
  }
  ex.joint.sample_k = r.get<std::size_t>(jt, "joint", "sample_k").value_or(ex.joint.sample_k);
  ex.joint.integer_init = r.get<bool>(jt, "joint", "integer_init").value_or(ex.joint.integer_init);
  if (ex.joint.dim < 2) r.fail("joint.dim", "must be >= 2");

  auto* comp = r.table("completion", {"tau", "enabled"});
  ex.completion.tau = r.get<double>(comp, "completion", "tau").value_or(ex.completion.tau);
  ex.complete = r.get<bool>(comp, "completion", "enabled").value_or(ex.complete);

  auto* fam = r.table("families", {"rule"});
  if (auto s = r.get<std::string>(fam, "families", "rule")) ex.family = parse_family_rule(*s);

  auto* rec = r.table("recommend", {"strategies"});
  if (auto list = r.strings(rec, "recommend", "strategies")) {
    cfg.strategies.clear();
    for (auto& s : *list) {
      auto st = parse_strategy(s);
      if (!st) r.fail("recommend.strategies", fmt::format("contains unknown strategy '{}'", s));
      cfg.strategies.push_back(*st);
    }
  }

  auto* exp = r.table("experiment", {"n_runs"});
  ex.n_runs = r.get<std::size_t>(exp, "experiment", "n_runs").value_or(ex.n_runs);
  if (ex.n_runs < 1) r.fail("experiment.n_runs", "must be >= 1");

  auto* cur = r.table("curation", {"mode", "server"});
  if (auto s = r.get<std::string>(cur, "curation", "mode")) {
    if (*s == "batch") cfg.curation_mode = CurationMode::Batch;
    else if (*s == "interactive") cfg.curation_mode = CurationMode::Interactive;
    else r.fail("curation.mode", "must be batch or interactive");
  }
  cfg.review_server = r.get<std::string>(cur, "curation", "server").value_or(cfg.review_server);
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  auto cfg = parse_config(read_file(path), fs::absolute(path).parent_path(), path.string());
  cfg.source = fs::absolute(path);
  return cfg;
}

void validate_paths(const PipelineConfig& cfg) {
  std::vector<std::string> missing;
  auto need = [&](const fs::path& p, std::string_view key, bool dir) {
    if (p.empty()) missing.push_back(fmt::format("paths.{} is not set", key));
    else if (dir ? !fs::is_directory(p) : !fs::is_regular_file(p))
      missing.push_back(fmt::format("paths.{} = {} does not exist", key, p.string()));
  };
  need(cfg.paths.model, "model", false);
  need(cfg.paths.requirements, "requirements", false);
  need(cfg.paths.corpus, "corpus", true);
  need(cfg.paths.pos_lexicon, "pos_lexicon", false);
  need(cfg.paths.stopwords, "stopwords", false);
  need(cfg.paths.synonym_lexicon, "synonym_lexicon", false);
  if (!cfg.paths.gold.empty() && !fs::is_regular_file(cfg.paths.gold))
    missing.push_back(fmt::format("paths.gold = {} does not exist", cfg.paths.gold.string()));
  if (!missing.empty()) {
    std::string msg = "invalid configuration:";
    for (auto& m : missing) msg += "\n  " + m;
    throw Error(msg);
  }
}

nlohmann::json PipelineConfig::to_json() const {
  auto& ex = experiment;
  nlohmann::json preds = nlohmann::json::array();
  for (auto& hp : hierarchy_predicates)
    preds.push_back(fmt::format("{}={}", hp.name, hp.child_to_parent ? "child-to-parent" : "parent-to-child"));
  nlohmann::json strats = nlohmann::json::array();
  for (auto s : strategies) strats.push_back(to_string(s));
  return {
      {"paths",
       {{"model", paths.model.string()},
        {"requirements", paths.requirements.string()},
        {"corpus", paths.corpus.string()},
        {"pos_lexicon", paths.pos_lexicon.string()},
        {"stopwords", paths.stopwords.string()},
        {"synonym_lexicon", paths.synonym_lexicon.string()},
        {"curation", paths.curation.string()},
        {"gold", paths.gold.string()}}},
      {"model",
       {{"syntax", model_syntax ? (*model_syntax == rdf::Syntax::Turtle ? "turtle" : "rdf-xml") : "auto"},
        {"hierarchy_predicates", preds},
        {"restrict", ex.restrict_to ? std::string(to_string(*ex.restrict_to)) : "none"},
        {"requirements_format", static_cast<int>(requirements_format)}}},
      {"split", {{"ratio", ex.split.ratio}, {"seed", ex.split.seed}, {"run_index", ex.split.run_index}}},
      {"terms", {{"threshold", ex.cvalue_threshold}}},
      {"synonyms", {{"sim_threshold", ex.synonyms.sim_threshold}}},
      {"word_embeddings",
       {{"dim", ex.words.dim},
        {"window", ex.words.window},
        {"min_count", ex.words.min_count},
        {"epochs", ex.words.epochs},
        {"negative", ex.words.negative},
        {"learning_rate", ex.words.learning_rate},
        {"seed", ex.words.seed}}},
      {"joint",
       {{"dim", ex.joint.dim},
        {"epochs", ex.joint.epochs},
        {"learning_rate", ex.joint.learning_rate},
        {"batch_size", ex.joint.batch_size},
        {"seed", ex.joint.seed},
        {"bias", ex.joint.bias},
        {"softmax", ex.joint.softmax == SoftmaxMode::Full ? "full" : "sampled"},
        {"sample_k", ex.joint.sample_k},
        {"integer_init", ex.joint.integer_init}}},
      {"completion", {{"tau", ex.completion.tau}, {"enabled", ex.complete}}},
      {"families", {{"rule", reqplumb::to_string(ex.family)}}},
      {"recommend", {{"strategies", strats}}},
      {"experiment", {{"n_runs", ex.n_runs}}},
      {"curation", {{"mode", curation_mode == CurationMode::Batch ? "batch" : "interactive"}, {"server", review_server}}},
  };
}

std::string PipelineConfig::hash() const { return sha256_hex(to_json().dump()); }

std::vector<std::string> config_diff(const nlohmann::json& before, const nlohmann::json& after) {
  std::vector<std::string> out;
  auto flat_before = before.flatten(), flat_after = after.flatten();
  std::set<std::string> keys;
  for (auto& [k, v] : flat_before.items()) keys.insert(k);
  for (auto& [k, v] : flat_after.items()) keys.insert(k);
  for (auto& k : keys) {
    auto a = flat_before.contains(k) ? flat_before[k].dump() : "(unset)";
    auto b = flat_after.contains(k) ? flat_after[k].dump() : "(unset)";
    if (a != b) out.push_back(fmt::format("{}: {} -> {}", k.substr(1), a, b));
  }
  return out;
}

}  // namespace reqplumb
