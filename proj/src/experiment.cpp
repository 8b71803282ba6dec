#include "reqplumb/experiment.hpp"

#include <chrono>

#include <fmt/format.h>

#include "reqplumb/common.hpp"

namespace reqplumb {

WordEmbeddings train_domain_words(const std::vector<Sentence>& corpus, const RequirementSet& requirements,
                                  const WordEmbeddingConfig& cfg) {
  auto sentences = corpus;
  for (auto& r : requirements.requirements) {
    Sentence s;
    for (auto& t : r.tokens) s.push_back(t.norm);
    if (!s.empty()) sentences.push_back(std::move(s));
  }
  return train_word_embeddings(sentences, cfg);
}

SplitSpec run_split(const ExperimentConfig& cfg, std::size_t run) {
  auto s = cfg.split;
  s.run_index += run;
  return s;
}

TermSet extract_step(const RequirementSet& reqs, TermSource source, const ExperimentInputs& in,
                     const ExperimentConfig& cfg) {
  auto ranked = cvalue_rank(extract_candidates(reqs, in.stopwords));
  return select_terms(ranked, cfg.cvalue_threshold, &in.term_decisions, source);
}

std::vector<std::string> model_terms(const DomainModel& model, std::optional<Category> restrict_to) {
  std::set<std::string> out;
  for (auto& e : model.entities())
    if (!restrict_to || e.category == *restrict_to) out.insert(e.label);
  return {out.begin(), out.end()};
}

std::vector<SynonymPair> synonym_step(const TermSet& terms, const ExperimentInputs& in, const ExperimentConfig& cfg,
                                      std::vector<std::string>* warnings) {
  auto pairs = detect_synonyms(terms.labels(), model_terms(in.model, cfg.restrict_to), in.words, in.lexicon,
                               cfg.synonyms, warnings);
  apply_decisions(pairs, in.synonym_decisions);
  return pairs;
}

Analysis analyze_step(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                      const std::vector<SynonymPair>& accepted, const MappingSet& mapping, const ExperimentConfig& cfg) {
  Analysis a;
  a.tree = build_hierarchy(model);
  a.mapped = mapping.mapped_entities();
  if (!rt.terms.empty()) a.types = entity_type_distribution(build_mapping(rt.labels(), model, accepted, std::nullopt), model);
  a.positions = node_position_distribution(a.mapped, a.tree);
  a.families = select_families(a.tree, model, a.mapped, cfg.family);
  a.requirement_side = requirement_side_stats(known, mapping);
  return a;
}

CompletionOutcome completion_step(const DomainModel& model, const RequirementSet& known, const TermSet& rt,
                                  const MappingSet& mapping, const ExperimentInputs& in, const ExperimentConfig& cfg,
                                  std::size_t run) {
  CompletionOutcome out;
  out.joint = prepare_joint_inputs(model, known, rt, mapping, in.stopwords);
  auto tc = cfg.joint;
  tc.seed = mix_seed(cfg.joint.seed, cfg.split.run_index + run);
  out.trained = train_joint(model, out.joint, tc);
  out.completed = complete_model(model, out.trained.space, mapping, rt.labels(), cfg.completion);
  return out;
}

std::vector<SynonymPair> all_accepted(const std::vector<SynonymPair>& known_pairs,
                                      const std::vector<SynonymPair>& holdout_pairs) {
  auto out = accepted_synonyms(known_pairs);
  for (auto& p : accepted_synonyms(holdout_pairs)) out.push_back(p);
  return out;
}

std::vector<std::string> gold_step(const TermSet& holdout_terms, const TermSet& rt, const std::vector<SynonymPair>& accepted,
                                   const DomainModel& model, const MappingSet& mapping, const ExperimentInputs& in) {
  if (in.gold_override) return *in.gold_override;
  return gold_terms(holdout_terms.labels(), rt.labels(), accepted, model, mapping.mapped_entities());
}

std::map<Strategy, Metrics> evaluate_strategies(const DomainModel& model, const Analysis& analysis,
                                                const GoldMatcher& gold) {
  std::map<Strategy, Metrics> out;
  for (auto s : kAllStrategies)
    out[s] = evaluate(recommend(model, analysis.tree, analysis.mapped, s, &analysis.families), model, gold);
  return out;
}

RunSummary run_once(const ExperimentInputs& in, const ExperimentConfig& cfg, std::size_t run) {
  RunSummary r;
  r.run = cfg.split.run_index + run;
  try {
    auto [known, holdout] = split_requirements(in.requirements, run_split(cfg, run));
    auto rt = extract_step(known, TermSource::Requirements70, in, cfg);
    auto ho = extract_step(holdout, TermSource::Holdout30, in, cfg);
    auto syn = synonym_step(rt, in, cfg);
    auto hsyn = synonym_step(ho, in, cfg);
    auto accepted = accepted_synonyms(syn);
    auto mapping = build_mapping(rt.labels(), in.model, accepted, cfg.restrict_to);
    auto every = all_accepted(syn, hsyn);
    auto gold = gold_step(ho, rt, every, in.model, mapping, in);
    GoldMatcher matcher(gold, every);
    r.gold = matcher.gold().size();
    r.mapping_rate = mapping.rate;

    auto analysis = analyze_step(in.model, known, rt, accepted, mapping, cfg);
    r.families = analysis.families.roots.size();
    r.original = evaluate_strategies(in.model, analysis, matcher);
    r.breakdown = family_breakdown(in.model, analysis.tree, analysis.mapped, analysis.families, matcher);

    if (cfg.complete) {
      auto outcome = completion_step(in.model, known, rt, mapping, in, cfg, run);
      auto& cm = outcome.completed;
      auto cmap = build_mapping(rt.labels(), cm.model, accepted, cfg.restrict_to);
      r.completed_mapping_rate = cmap.rate;
      r.added_links = cm.added_links.size();
      auto ca = analyze_step(cm.model, known, rt, accepted, cmap, cfg);
      r.completed = evaluate_strategies(cm.model, ca, matcher);
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

Gains gains(const Metrics& old_m, const Metrics& new_m) {
  auto g = [](double o, double n) { return o == 0 ? 0.0 : (n - o) / o; };
  return {g(old_m.recall, new_m.recall), g(old_m.precision, new_m.precision), g(old_m.f2, new_m.f2)};
}

namespace {

std::map<Strategy, Metrics> average(const std::vector<RunSummary>& runs, bool completed) {
  std::map<Strategy, Metrics> sum;
  std::map<Strategy, std::size_t> n;
  for (auto& r : runs) {
    if (!r.ok) continue;
    for (auto& [s, m] : completed ? r.completed : r.original) {
      auto& acc = sum[s];
      acc.recall += m.recall;
      acc.precision += m.precision;
      acc.f2 += m.f2;
      acc.gold += m.gold;
      acc.gold_hit += m.gold_hit;
      acc.recommended += m.recommended;
      acc.recommended_hit += m.recommended_hit;
      ++n[s];
    }
  }
  for (auto& [s, m] : sum) {
    double k = static_cast<double>(n[s]);
    m.recall /= k;
    m.precision /= k;
    m.f2 /= k;
    m.gold = static_cast<std::size_t>(static_cast<double>(m.gold) / k + 0.5);
    m.gold_hit = static_cast<std::size_t>(static_cast<double>(m.gold_hit) / k + 0.5);
    m.recommended = static_cast<std::size_t>(static_cast<double>(m.recommended) / k + 0.5);
    m.recommended_hit = static_cast<std::size_t>(static_cast<double>(m.recommended_hit) / k + 0.5);
  }
  return sum;
}

}  // namespace

ExperimentReport aggregate(std::vector<RunSummary> runs) {
  ExperimentReport rep;
  rep.runs = std::move(runs);
  for (auto& r : rep.runs) rep.completed_runs += r.ok;
  rep.original_avg = average(rep.runs, false);
  rep.completed_avg = average(rep.runs, true);
  auto fam = Strategy::FamilyBelonging;
  if (rep.original_avg.count(fam) && rep.completed_avg.count(fam)) {
    rep.family_gain = gains(rep.original_avg[fam], rep.completed_avg[fam]);
    rep.overall_gain = gains(rep.original_avg[Strategy::None], rep.completed_avg[fam]);
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentInputs& in, const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  std::vector<RunSummary> runs;
  for (std::size_t i = 0; i < cfg.n_runs; ++i) runs.push_back(run_once(in, cfg, i));
  auto rep = aggregate(std::move(runs));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

nlohmann::json metrics_map(const std::map<Strategy, Metrics>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [s, x] : m) j[std::string(to_string(s))] = to_json(x);
  return j;
}

nlohmann::json gains_json(const Gains& g) { return {{"recall", g.recall}, {"precision", g.precision}, {"f2", g.f2}}; }

}  // namespace

nlohmann::json to_json(const RunSummary& r) {
  nlohmann::json fams = nlohmann::json::array();
  for (auto& f : r.breakdown)
    fams.push_back({{"root", f.root},
                    {"label", f.label},
                    {"actually", f.actually},
                    {"should_have", f.should_have},
                    {"metrics", to_json(f.metrics)}});
  nlohmann::json j = {{"run", r.run},
                      {"ok", r.ok},
                      {"gold", r.gold},
                      {"mapping_rate", r.mapping_rate},
                      {"completed_mapping_rate", r.completed_mapping_rate},
                      {"added_links", r.added_links},
                      {"families", r.families},
                      {"original", metrics_map(r.original)},
                      {"completed", metrics_map(r.completed)},
                      {"family_breakdown", fams}};
  if (!r.ok) j["error"] = r.error;
  return j;
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (auto& x : r.runs) runs.push_back(to_json(x));
  return {{"schema", kSchemaVersion},
          {"n_runs", r.runs.size()},
          {"completed_runs", r.completed_runs},
          {"incomplete_runs", r.runs.size() - r.completed_runs},
          {"seconds", r.seconds},
          {"averages", {{"original", metrics_map(r.original_avg)}, {"completed", metrics_map(r.completed_avg)}}},
          {"gain", {{"family", gains_json(r.family_gain)}, {"overall", gains_json(r.overall_gain)}}},
          {"runs", runs}};
}

std::string report_csv(const ExperimentReport& r) {
  std::string out = "model,strategy,recall,precision,f2\n";
  auto rows = [&](std::string_view model, const std::map<Strategy, Metrics>& m) {
    for (auto& [s, x] : m) out += fmt::format("{},{},{:.4f},{:.4f},{:.4f}\n", model, to_string(s), x.recall, x.precision, x.f2);
  };
  rows("original", r.original_avg);
  rows("completed", r.completed_avg);
  out += fmt::format("gain,family,{:.4f},{:.4f},{:.4f}\n", r.family_gain.recall, r.family_gain.precision, r.family_gain.f2);
  out += fmt::format("gain,overall,{:.4f},{:.4f},{:.4f}\n", r.overall_gain.recall, r.overall_gain.precision,
                     r.overall_gain.f2);
  return out;
}

}  // namespace reqplumb
