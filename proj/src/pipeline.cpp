#include "reqplumb/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "reqplumb/common.hpp"
#include "reqplumb/text.hpp"

namespace reqplumb {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::Ingest, "ingest"},     {Stage::Extract, "extract"}, {Stage::Synonyms, "synonyms"},
    {Stage::Map, "map"},           {Stage::Embed, "embed"},     {Stage::Complete, "complete"},
    {Stage::Analyze, "analyze"},   {Stage::Recommend, "recommend"}, {Stage::Evaluate, "evaluate"},
};

std::vector<Stage> upstream(Stage s) {
  switch (s) {
    case Stage::Ingest: return {};
    case Stage::Extract: return {Stage::Ingest};
    case Stage::Synonyms: return {Stage::Ingest, Stage::Extract};
    case Stage::Map: return {Stage::Ingest, Stage::Extract, Stage::Synonyms};
    case Stage::Embed: return {Stage::Ingest, Stage::Extract, Stage::Map};
    case Stage::Complete: return {Stage::Ingest, Stage::Extract, Stage::Synonyms, Stage::Map, Stage::Embed};
    case Stage::Analyze: return {Stage::Ingest, Stage::Extract, Stage::Synonyms, Stage::Map, Stage::Complete};
    case Stage::Recommend: return {Stage::Ingest, Stage::Map, Stage::Complete, Stage::Analyze};
    case Stage::Evaluate:
      return {Stage::Ingest, Stage::Extract, Stage::Synonyms, Stage::Map, Stage::Complete, Stage::Analyze, Stage::Recommend};
  }
  return {};
}

constexpr std::string_view kKnownTerms = "terms_requirements-70.json";
constexpr std::string_view kHoldoutTerms = "terms_holdout-30.json";

std::string file_hash(const fs::path& p) {
  if (p.empty() || !fs::exists(p)) return "-";
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (auto& e : fs::recursive_directory_iterator(p))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string acc;
    for (auto& f : files) acc += fs::relative(f, p).string() + ":" + sha256_hex(read_file(f)) + "\n";
    return sha256_hex(acc);
  }
  return sha256_hex(read_file(p));
}

std::vector<std::string> read_gold(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(normalize_label(t));
  }
  return out;
}

}  // namespace

std::string_view to_string(Stage s) {
  for (auto& [st, name] : kStageNames)
    if (st == s) return name;
  return "ingest";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (auto& [st, name] : kStageNames)
    if (name == s) return st;
  return std::nullopt;
}

std::string primary_artifact(Stage s, const PipelineConfig& cfg) {
  switch (s) {
    case Stage::Ingest: return "requirements.jsonl";
    case Stage::Extract: return std::string(kKnownTerms);
    case Stage::Synonyms: return "synonyms.json";
    case Stage::Map: return "mapping.json";
    case Stage::Embed: return "embeddings.json";
    case Stage::Complete: return "completed_model.json";
    case Stage::Analyze: return "regularities.json";
    case Stage::Recommend:
      return fmt::format("recommendations_{}.json",
                         to_string(cfg.strategies.empty() ? Strategy::FamilyBelonging : cfg.strategies.front()));
    case Stage::Evaluate: return "evaluation_report.json";
  }
  return {};
}

fs::path curation_dir(const PipelineConfig& cfg, const Workspace& ws) {
  return cfg.paths.curation.empty() ? ws.root() / "curation" : cfg.paths.curation;
}

Pipeline::Pipeline(PipelineConfig cfg, Workspace& ws, Log log)
    : cfg_(std::move(cfg)), ws_(ws), curation_(curation_dir(cfg_, ws)), log_(std::move(log)) {}

std::string Pipeline::fingerprint(Stage stage) const {
  std::string acc = fmt::format("{}\n{}\n", to_string(stage), cfg_.hash());
  for (auto up : upstream(stage)) {
    auto* rec = ws_.stage(to_string(up));
    acc += fmt::format("{}={}", to_string(up), rec ? rec->artifact.hash : "-");
    if (rec)
      for (auto& e : rec->extras) acc += "," + e.hash;
    acc += "\n";
  }
  auto& p = cfg_.paths;
  switch (stage) {
    case Stage::Ingest:
      acc += file_hash(p.requirements) + file_hash(p.model) + file_hash(p.pos_lexicon);
      break;
    case Stage::Extract:
      acc += file_hash(p.stopwords) + curation_.hash("terms");
      break;
    case Stage::Synonyms:
      acc += file_hash(p.synonym_lexicon) + file_hash(p.corpus) + curation_.hash("synonyms");
      break;
    case Stage::Map:
    case Stage::Embed:
      acc += file_hash(p.stopwords);
      break;
    case Stage::Evaluate:
      acc += file_hash(p.stopwords) + file_hash(p.synonym_lexicon) + file_hash(p.gold) + curation_.hash("terms") +
             curation_.hash("synonyms");
      break;
    default: break;
  }
  return sha256_hex(acc);
}

void Pipeline::check_server() const {
  httplib::Client cli(cfg_.review_server);
  cli.set_connection_timeout(2);
  auto res = cli.Get("/api/status");
  if (!res || res->status != 200)
    throw Error(fmt::format("interactive curation needs the review server at {} (start it with: reqplumb serve)",
                            cfg_.review_server));
}

StageResult Pipeline::run(Stage stage) {
  auto fp = fingerprint(stage);
  auto* rec = ws_.stage(to_string(stage));
  if (rec && rec->fingerprint == fp && ws_.intact(*rec)) {
    StageResult r{stage, true, rec->status, {}, {}};
    if (log_) log_(fmt::format("{}: up to date", to_string(stage)));
    return r;
  }
  if (log_) log_(fmt::format("{}: running", to_string(stage)));
  auto result = execute(stage);
  StageRecord out;
  out.stage = std::string(to_string(stage));
  out.fingerprint = fp;
  out.status = result.status;
  auto primary = primary_artifact(stage, cfg_);
  for (auto& w : result.written) {
    ArtifactRecord a{w, sha256_hex(read_file(ws_.root() / w))};
    if (w == primary) out.artifact = a;
    else out.extras.push_back(a);
  }
  ws_.record(out);
  for (auto& w : result.warnings)
    if (log_) log_(fmt::format("{}: warning: {}", to_string(stage), w));
  return result;
}

StageResult Pipeline::execute(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return ingest();
    case Stage::Extract: return extract();
    case Stage::Synonyms: return synonyms();
    case Stage::Map: return map();
    case Stage::Embed: return embed();
    case Stage::Complete: return complete();
    case Stage::Analyze: return analyze();
    case Stage::Recommend: return recommend();
    case Stage::Evaluate: return evaluate();
  }
  throw Error("unknown stage");
}

Pipeline::RunAll Pipeline::run_all() {
  RunAll out;
  if (cfg_.curation_mode == CurationMode::Interactive) check_server();
  for (auto s : kAllStages) {
    out.stages.push_back(run(s));
    if (out.stages.back().status == "awaiting-curation") {
      out.awaiting_curation = true;
      return out;
    }
  }
  out.report = ExperimentReport{};
  auto j = ws_.read_json("evaluate", "evaluation_report.json");
  out.report->completed_runs = j.at("completed_runs").get<std::size_t>();
  out.report->seconds = j.at("seconds").get<double>();
  return out;
}

namespace {

struct Loaded {
  RequirementSet all, known, holdout;
  DomainModel model;
};

Loaded load_base(const Workspace& ws) {
  Loaded l;
  auto split = ws.read_json("ingest", "split.json");
  auto name = split.at("name").get<std::string>();
  l.all = requirements_from_jsonl(ws.read("ingest", "requirements.jsonl"), name);
  std::set<std::string> known_ids;
  for (auto& id : split.at("known")) known_ids.insert(id.get<std::string>());
  l.known.name = name + "-known";
  l.holdout.name = name + "-holdout";
  l.known.provenance = l.holdout.provenance = l.all.provenance;
  for (auto& r : l.all.requirements) (known_ids.count(r.id) ? l.known : l.holdout).requirements.push_back(r);
  l.model = model_from_json(ws.read_json("ingest", "model.json"));
  return l;
}

TermSet load_terms(const Workspace& ws, std::string_view file) {
  return termset_from_json(ws.read_json("extract", std::string(file)));
}

std::vector<SynonymPair> load_pairs(const Workspace& ws, const char* key) {
  auto j = ws.read_json("synonyms", "synonyms.json");
  std::vector<SynonymPair> out;
  for (auto& p : j.at(key)) out.push_back(synonym_pair_from_json(p));
  return out;
}

std::size_t pending_terms(const TermSet& t) {
  return static_cast<std::size_t>(
      std::count_if(t.terms.begin(), t.terms.end(), [](auto& c) { return c.status == Status::Auto; }));
}

nlohmann::json analysis_json(const Analysis& a, const MappingSet& m) {
  return {{"mapping_rate", m.rate},
          {"mapped_terms", m.mapped_terms},
          {"mapped_entities", a.mapped},
          {"entity_types", to_json(a.types)},
          {"positions", to_json(a.positions)},
          {"requirement_side", to_json(a.requirement_side)},
          {"family_roots", to_json(a.families).at("roots")}};
}

}  // namespace

ExperimentInputs Pipeline::experiment_inputs() const {
  ExperimentInputs in;
  auto base = load_base(ws_);
  in.requirements = std::move(base.all);
  in.model = std::move(base.model);
  in.stopwords = load_stopwords(cfg_.paths.stopwords);
  in.lexicon = SynonymLexicon::load(cfg_.paths.synonym_lexicon);
  in.term_decisions = curation_.load("terms");
  in.synonym_decisions = curation_.load("synonyms");
  if (ws_.stage("synonyms")) in.words = word_embeddings_from_json(ws_.read_json("synonyms", "word_embeddings.json"));
  if (!cfg_.paths.gold.empty()) in.gold_override = read_gold(cfg_.paths.gold);
  return in;
}

StageResult Pipeline::ingest() {
  StageResult r{Stage::Ingest, false, "done", {}, {}};
  validate_paths(cfg_);
  auto reqs = load_requirements(cfg_.paths.requirements, cfg_.requirements_format);
  reqs = annotate(std::move(reqs), PosLexicon::load(cfg_.paths.pos_lexicon));
  auto syntax = cfg_.model_syntax.value_or(rdf::syntax_for_path(cfg_.paths.model));
  auto model = parse_rdf(cfg_.paths.model, syntax, cfg_.hierarchy_predicates);
  auto tree = build_hierarchy(model);
  auto [known, holdout] = split_requirements(reqs, run_split(cfg_.experiment, 0));

  nlohmann::json split = {{"schema", kSchemaVersion},
                          {"name", reqs.name},
                          {"ratio", cfg_.experiment.split.ratio},
                          {"seed", cfg_.experiment.split.seed},
                          {"run_index", cfg_.experiment.split.run_index},
                          {"known", nlohmann::json::array()},
                          {"holdout", nlohmann::json::array()}};
  for (auto& q : known.requirements) split["known"].push_back(q.id);
  for (auto& q : holdout.requirements) split["holdout"].push_back(q.id);

  ws_.write("requirements.jsonl", to_jsonl(reqs));
  ws_.write_json("model.json", to_json(model));
  ws_.write_json("hierarchy.json", to_json(tree));
  ws_.write_json("split.json", split);
  r.written = {"requirements.jsonl", "model.json", "hierarchy.json", "split.json"};
  r.warnings = model.warnings;
  r.warnings.insert(r.warnings.end(), tree.warnings.begin(), tree.warnings.end());
  if (classes_of(model).empty()) r.warnings.push_back("domain model has no Classes entities");
  return r;
}

StageResult Pipeline::extract() {
  StageResult r{Stage::Extract, false, "done", {}, {}};
  auto base = load_base(ws_);
  ExperimentInputs in;
  in.stopwords = load_stopwords(cfg_.paths.stopwords);
  in.term_decisions = curation_.load("terms");
  auto rt = extract_step(base.known, TermSource::Requirements70, in, cfg_.experiment);
  auto ho = extract_step(base.holdout, TermSource::Holdout30, in, cfg_.experiment);
  ws_.write_json(std::string(kKnownTerms), to_json(rt));
  ws_.write_json(std::string(kHoldoutTerms), to_json(ho));
  r.written = {std::string(kKnownTerms), std::string(kHoldoutTerms)};
  r.warnings = rt.warnings;
  if (cfg_.curation_mode == CurationMode::Interactive && pending_terms(rt) > 0) {
    r.status = "awaiting-curation";
    r.warnings.push_back(fmt::format("{} term(s) await a decision", pending_terms(rt)));
  }
  return r;
}

StageResult Pipeline::synonyms() {
  StageResult r{Stage::Synonyms, false, "done", {}, {}};
  auto base = load_base(ws_);
  ExperimentInputs in;
  in.model = base.model;
  in.lexicon = SynonymLexicon::load(cfg_.paths.synonym_lexicon);
  in.synonym_decisions = curation_.load("synonyms");
  in.words = train_domain_words(load_corpus(cfg_.paths.corpus), base.all, cfg_.experiment.words);
  auto rt = load_terms(ws_, kKnownTerms);
  auto ho = load_terms(ws_, kHoldoutTerms);
  std::vector<std::string> warnings;
  auto pairs = synonym_step(rt, in, cfg_.experiment, &warnings);
  auto hpairs = synonym_step(ho, in, cfg_.experiment, nullptr);
  auto j = synonyms_to_json(pairs, cfg_.experiment.synonyms.sim_threshold, warnings);
  j["holdout_pairs"] = nlohmann::json::array();
  for (auto& p : hpairs) j["holdout_pairs"].push_back(to_json(p));
  ws_.write_json("synonyms.json", j);
  ws_.write_json("word_embeddings.json", to_json(in.words));
  r.written = {"synonyms.json", "word_embeddings.json"};
  r.warnings = warnings;
  auto pending = std::count_if(pairs.begin(), pairs.end(), [](auto& p) {
    return p.rule == SynRule::EmbeddingOnly && p.status == Status::Auto;
  });
  if (cfg_.curation_mode == CurationMode::Interactive && pending > 0) {
    r.status = "awaiting-curation";
    r.warnings.push_back(fmt::format("{} synonym pair(s) await a decision", pending));
  }
  return r;
}

StageResult Pipeline::map() {
  StageResult r{Stage::Map, false, "done", {}, {}};
  auto base = load_base(ws_);
  auto rt = load_terms(ws_, kKnownTerms);
  auto accepted = accepted_synonyms(load_pairs(ws_, "pairs"));
  auto restrict_to = cfg_.experiment.restrict_to;
  if (rt.terms.empty()) throw Error("no requirement terms were selected; lower terms.threshold or review curation");
  auto mapping = build_mapping(rt.labels(), base.model, accepted, restrict_to);
  auto rows = compare_mapping_methods(base.known, load_stopwords(cfg_.paths.stopwords), rt, base.model, accepted,
                                      restrict_to);
  ws_.write_json("mapping.json", to_json(mapping));
  ws_.write_json("mapping_comparison.json", to_json(rows));
  r.written = {"mapping.json", "mapping_comparison.json"};
  return r;
}

StageResult Pipeline::embed() {
  StageResult r{Stage::Embed, false, "done", {}, {}};
  auto base = load_base(ws_);
  auto rt = load_terms(ws_, kKnownTerms);
  auto mapping = mapping_from_json(ws_.read_json("map", "mapping.json"));
  auto joint = prepare_joint_inputs(base.model, base.known, rt, mapping, load_stopwords(cfg_.paths.stopwords));
  auto tc = cfg_.experiment.joint;
  tc.seed = mix_seed(cfg_.experiment.joint.seed, cfg_.experiment.split.run_index);
  if (!cfg_.experiment.complete) tc.epochs = 0;
  TrainResult trained;
  try {
    trained = train_joint(base.model, joint, tc);
  } catch (const TrainingDiverged& d) {
    ws_.write_json("embeddings.checkpoint.json", to_json(d.checkpoint));
    ws_.write("training_log.csv", training_log_csv(d.log));
    throw Error(fmt::format("{}; checkpoint written to embeddings.checkpoint.json", d.what()));
  }
  auto j = to_json(trained.space);
  j["cooccurrence_pairs"] = joint.pairs.size();
  j["alignment_triplets"] = joint.alignment.size();
  j["epochs"] = tc.epochs;
  ws_.write_json("embeddings.json", j);
  ws_.write("training_log.csv", training_log_csv(trained.log));
  r.written = {"embeddings.json", "training_log.csv"};
  return r;
}

StageResult Pipeline::complete() {
  StageResult r{Stage::Complete, false, "done", {}, {}};
  auto base = load_base(ws_);
  auto rt = load_terms(ws_, kKnownTerms);
  auto accepted = accepted_synonyms(load_pairs(ws_, "pairs"));
  auto mapping = mapping_from_json(ws_.read_json("map", "mapping.json"));
  auto space = space_from_json(ws_.read_json("embed", "embeddings.json"));
  CompletedModel cm = cfg_.experiment.complete
                          ? complete_model(base.model, space, mapping, rt.labels(), cfg_.experiment.completion)
                          : restructure(base.model, {}, {});
  auto report = completion_report(cm, base.model, rt.labels(), accepted);
  ws_.write_json("completed_model.json", to_json(cm));
  auto rj = to_json(report);
  rj["unadded_terms"] = cm.unadded.size();
  rj["warnings"] = cm.warnings;
  ws_.write_json("completion_report.json", rj);
  r.written = {"completed_model.json", "completion_report.json"};
  r.warnings = cm.warnings;
  return r;
}

StageResult Pipeline::analyze() {
  StageResult r{Stage::Analyze, false, "done", {}, {}};
  auto base = load_base(ws_);
  auto rt = load_terms(ws_, kKnownTerms);
  auto accepted = accepted_synonyms(load_pairs(ws_, "pairs"));
  auto mapping = mapping_from_json(ws_.read_json("map", "mapping.json"));
  auto cm = completed_model_from_json(ws_.read_json("complete", "completed_model.json"));
  auto& ex = cfg_.experiment;
  auto original = analyze_step(base.model, base.known, rt, accepted, mapping, ex);
  auto cmap = build_mapping(rt.labels(), cm.model, accepted, ex.restrict_to);
  auto completed = analyze_step(cm.model, base.known, rt, accepted, cmap, ex);

  ws_.write_json("regularities.json", {{"schema", kSchemaVersion},
                                       {"original", analysis_json(original, mapping)},
                                       {"completed", analysis_json(completed, cmap)}});
  auto fj = to_json(original.families);
  fj["completed"] = to_json(completed.families);
  ws_.write_json("families.json", fj);
  r.written = {"regularities.json", "families.json"};
  r.warnings = original.types.warnings;
  return r;
}

StageResult Pipeline::recommend() {
  StageResult r{Stage::Recommend, false, "done", {}, {}};
  auto base = load_base(ws_);
  auto cm = completed_model_from_json(ws_.read_json("complete", "completed_model.json"));
  auto tree = tree_from_json(ws_.read_json("ingest", "hierarchy.json"));
  auto reg = ws_.read_json("analyze", "regularities.json");
  auto fj = ws_.read_json("analyze", "families.json");
  auto families = families_from_json(fj);
  auto cfamilies = families_from_json(fj.at("completed"));
  auto mapped = reg.at("original").at("mapped_entities").get<std::set<std::string>>();
  auto cmapped = reg.at("completed").at("mapped_entities").get<std::set<std::string>>();
  for (auto s : cfg_.strategies) {
    auto o = reqplumb::recommend(base.model, tree, mapped, s, &families);
    auto c = reqplumb::recommend(cm.model, cm.tree, cmapped, s, &cfamilies);
    auto file = fmt::format("recommendations_{}.json", to_string(s));
    ws_.write_json(file, {{"schema", kSchemaVersion},
                          {"strategy", to_string(s)},
                          {"original", to_json(o, base.model)},
                          {"completed", to_json(c, cm.model)}});
    r.written.push_back(file);
  }
  return r;
}

StageResult Pipeline::evaluate() {
  StageResult r{Stage::Evaluate, false, "done", {}, {}};
  auto& ex = cfg_.experiment;
  auto in = experiment_inputs();
  auto base = load_base(ws_);
  auto rt = load_terms(ws_, kKnownTerms);
  auto ho = load_terms(ws_, kHoldoutTerms);
  auto pairs = load_pairs(ws_, "pairs");
  auto hpairs = load_pairs(ws_, "holdout_pairs");
  auto mapping = mapping_from_json(ws_.read_json("map", "mapping.json"));
  auto cm = completed_model_from_json(ws_.read_json("complete", "completed_model.json"));
  auto tree = tree_from_json(ws_.read_json("ingest", "hierarchy.json"));
  auto reg = ws_.read_json("analyze", "regularities.json");
  auto families = families_from_json(ws_.read_json("analyze", "families.json"));
  auto cmap = build_mapping(rt.labels(), cm.model, accepted_synonyms(pairs), ex.restrict_to);

  // Run 0 comes from the workspace artifacts; the rest are recomputed.
  RunSummary first;
  first.run = ex.split.run_index;
  try {
    auto every = all_accepted(pairs, hpairs);
    GoldMatcher matcher(gold_step(ho, rt, every, in.model, mapping, in), every);
    first.gold = matcher.gold().size();
    first.mapping_rate = mapping.rate;
    first.completed_mapping_rate = cmap.rate;
    first.added_links = cm.added_links.size();
    first.families = families.roots.size();
    auto to_rec = [](Strategy s, const nlohmann::json& j) {
      Recommendation rec{s, {}};
      for (auto& e : j.at("entities")) rec.entities.push_back(e.at("iri"));
      return rec;
    };
    for (auto s : cfg_.strategies) {
      auto j = ws_.read_json("recommend", fmt::format("recommendations_{}.json", to_string(s)));
      first.original[s] = reqplumb::evaluate(to_rec(s, j.at("original")), in.model, matcher);
      if (ex.complete) first.completed[s] = reqplumb::evaluate(to_rec(s, j.at("completed")), cm.model, matcher);
    }
    auto mapped = reg.at("original").at("mapped_entities").get<std::set<std::string>>();
    first.breakdown = family_breakdown(in.model, tree, mapped, families, matcher);
    first.ok = true;
  } catch (const Error& e) {
    first.ok = false;
    first.error = e.what();
  }

  auto start = std::chrono::steady_clock::now();
  std::vector<RunSummary> runs{first};
  for (std::size_t i = 1; i < ex.n_runs; ++i) {
    if (log_) log_(fmt::format("evaluate: run {}/{}", i + 1, ex.n_runs));
    runs.push_back(run_once(in, ex, i));
  }
  auto report = aggregate(std::move(runs));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& run : report.runs)
    if (!run.ok) r.warnings.push_back(fmt::format("run {} incomplete: {}", run.run, run.error));
  ws_.write_json("evaluation_report.json", to_json(report));
  ws_.write("evaluation_report.csv", report_csv(report));
  r.written = {"evaluation_report.json", "evaluation_report.csv"};
  return r;
}

}  // namespace reqplumb
