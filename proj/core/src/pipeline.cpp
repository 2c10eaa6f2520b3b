#include "wikiclean/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/report.hpp"
#include "wikiclean/sampling.hpp"
#include "wikiclean/script_filter.hpp"

namespace wikiclean::pipeline {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail_stage(Manifest& manifest, std::string_view stage, const Error& e) {
  manifest.valid = false;
  manifest.error = "stage " + std::string(stage) + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::Usage: throw UsageError(manifest.error);
    case ErrorKind::Degenerate: throw DegenerateError(manifest.error);
    case ErrorKind::Data: break;
  }
  throw DataError(manifest.error);
}

template <typename Fn>
auto run_stage(Manifest& manifest, std::string_view stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail_stage(manifest, stage, e);
  }
}

script::ScriptRegistry load_registry(const PipelineConfig& config) {
  auto registry = config.registry.empty() ? script::ScriptRegistry::builtin()
                                          : script::ScriptRegistry::load(config.registry);
  if (!config.registry_overrides.empty()) {
    registry.merge(script::ScriptRegistry::load(config.registry_overrides));
  }
  return registry;
}

void apply_default_lang(std::vector<Document>& docs, const std::string& lang) {
  if (lang.empty()) return;
  for (auto& d : docs) {
    if (d.lang.empty()) d.lang = lang;
  }
}

std::string wiki_code(const PipelineConfig& config, std::span<const Document> docs) {
  if (!config.lang.empty()) return config.lang;
  if (!docs.empty() && !docs.front().lang.empty()) return docs.front().lang;
  return config.input.stem().string();
}

// Script filter, exact dedup and MinHash dedup, recording each stage in
// `manifest` as it completes so a failure leaves the finished prefix.
std::vector<Document> primary_stages(const PipelineConfig& config, std::vector<Document> docs,
                                     Manifest& manifest,
                                     std::vector<dedup::DedupVerdict>& verdicts) {
  apply_default_lang(docs, config.lang);

  auto before = corpus_stats(docs);
  if (config.script_enabled) {
    docs = run_stage(manifest, kStageScript, [&] {
      const auto registry = load_registry(config);
      return script::filter_corpus(docs, registry, config.workers).kept;
    });
  }
  auto after = corpus_stats(docs);
  manifest.stages.push_back(make_delta(std::string(kStageScript), before, after));

  before = after;
  auto exact = run_stage(manifest, kStageExact, [&] { return dedup::exact_dedup(docs); });
  docs = std::move(exact.kept);
  verdicts = std::move(exact.verdicts);
  after = corpus_stats(docs);
  manifest.stages.push_back(make_delta(std::string(kStageExact), before, after));

  before = after;
  auto params = config.dedup;
  params.workers = config.workers;
  auto near = run_stage(manifest, kStageMinHash, [&] { return dedup::minhash_dedup(docs, params); });
  docs = std::move(near.kept);
  verdicts.insert(verdicts.end(), near.verdicts.begin(), near.verdicts.end());
  after = corpus_stats(docs);
  manifest.stages.push_back(make_delta(std::string(kStageMinHash), before, after));
  return docs;
}

std::vector<heuristics::ScoreTarget> targets_for(const HeuristicConfig& h) {
  std::vector<heuristics::ScoreTarget> out;
  if (h.per_metric) {
    for (auto m : heuristics::kAllMetrics) out.emplace_back(m);
  } else {
    for (auto f : heuristics::kAllFamilies) out.emplace_back(f);
  }
  return out;
}

ThresholdRecord record_of(const threshold::Threshold& t, bool per_metric) {
  ThresholdRecord r;
  r.target = t.target;
  r.side = std::string(threshold::side_name(t.side));
  r.cut = t.cut;
  r.frac = t.frac;
  r.n_docs = t.n_docs;
  r.n_sample = t.n_sample;
  r.seed = t.seed;
  r.bandwidth = t.bandwidth;
  r.per_metric = per_metric;
  return r;
}

void heuristic_stage(const PipelineConfig& config, HeuristicResult& result) {
  const auto& h = config.heuristic;
  auto& manifest = result.manifest;
  const auto before = corpus_stats(result.corpus);

  // Drop any earlier heuristic record so re-running does not stack stages.
  std::erase_if(manifest.stages,
                [](const StageDelta& d) { return d.stage_name == kStageHeuristic; });
  manifest.thresholds.clear();

  if (!h.enabled) {
    manifest.stages.push_back(make_delta(std::string(kStageHeuristic), before, before));
    return;
  }
  if (result.corpus.empty()) {
    manifest.warnings.push_back("heuristic-prune: empty corpus, nothing to threshold");
    manifest.stages.push_back(make_delta(std::string(kStageHeuristic), before, before));
    return;
  }

  result.scores = run_stage(manifest, kStageHeuristic, [&] {
    return heuristics::score_corpus(result.corpus, {h.trigram_unit}, {}, config.workers);
  });

  for (const auto& target : targets_for(h)) {
    const auto name = heuristics::target_name(target);
    const auto spec = h.side_for(name);
    if (spec == SideSpec::Off) continue;
    std::vector<threshold::Side> sides;
    if (spec == SideSpec::Low || spec == SideSpec::Both) sides.push_back(threshold::Side::Low);
    if (spec == SideSpec::High || spec == SideSpec::Both) sides.push_back(threshold::Side::High);
    const auto column = result.scores.column(target);
    for (const auto side : sides) {
      try {
        auto t = threshold::select_threshold(column, side, h.frac, h.seed, name);
        manifest.thresholds.push_back(record_of(t, h.per_metric));
        result.thresholds.push_back(std::move(t));
      } catch (const DegenerateError& e) {
        const std::string what = name + " (" + std::string(threshold::side_name(side)) + "): " + e.what();
        if (!h.skip_degenerate) {
          fail_stage(manifest, kStageHeuristic, DegenerateError(what));
        }
        manifest.warnings.push_back("skipped " + what);
        ThresholdRecord skipped;
        skipped.target = name;
        skipped.side = std::string(threshold::side_name(side));
        skipped.frac = h.frac;
        skipped.n_docs = column.size();
        skipped.seed = h.seed;
        skipped.per_metric = h.per_metric;
        skipped.skipped_reason = e.what();
        manifest.thresholds.push_back(std::move(skipped));
      } catch (const Error& e) {
        fail_stage(manifest, kStageHeuristic, e);
      }
    }
  }

  auto pruned = run_stage(manifest, kStageHeuristic, [&] {
    return threshold::prune(result.corpus, result.scores, result.thresholds,
                            std::string(kStageHeuristic));
  });
  result.corpus = std::move(pruned.kept);
  result.removed = std::move(pruned.removed);
  manifest.stages.push_back(std::move(pruned.delta));
}

void write_verdicts(std::span<const dedup::DedupVerdict> verdicts, const fs::path& path) {
  std::string text;
  for (const auto& v : verdicts) {
    text += dedup::format_verdict_line(v);
    text += '\n';
  }
  io::write_file_atomic(path, text);
}

void write_primary_outputs(const PipelineConfig& config, const PrimaryResult& r) {
  io::write_corpus(r.corpus, config.output_dir / "primary.jsonl");
  write_verdicts(r.verdicts, config.output_dir / "verdicts.jsonl");
}

void write_heuristic_outputs(const PipelineConfig& config, const HeuristicResult& r) {
  io::write_corpus(r.corpus, config.output_dir / "heuristic.jsonl");
  io::write_corpus(r.removed, config.output_dir / "heuristic_removed.jsonl");
  io::write_file_atomic(config.output_dir / "metrics.csv", heuristics::format_metric_csv(r.scores));
  io::write_file_atomic(config.output_dir / "thresholds.json",
                        threshold::format_thresholds_json(r.thresholds));
}

void check_complete(const Manifest& manifest) {
  try {
    validate_manifest(manifest);
  } catch (const DataError& e) {
    throw DataError(std::string("manifest does not validate: ") + e.what());
  }
}

}  // namespace

Manifest new_manifest(const PipelineConfig& config) {
  Manifest m;
  m.tool_version = std::string(tool_version());
  m.wiki = config.lang;
  m.config = config_snapshot(config);
  m.dedup = config.dedup;
  m.dedup->workers = 1;
  m.choices["script.shared_scripts"] = "retained (Common, Inherited)";
  m.choices["dedup.verification"] =
      config.dedup.exact_verify ? "exact shingle Jaccard" : "signature estimate";
  m.choices["heuristic.threshold_mode"] = config.heuristic.per_metric ? "raw metric" : "family score";
  m.choices["heuristic.normalization"] = "empirical min-max per corpus";
  m.choices["heuristic.entropy_base"] = "2";
  m.choices["heuristic.trigram_unit"] =
      std::string(heuristics::trigram_unit_name(config.heuristic.trigram_unit));
  m.choices["threshold.objective"] =
      "smoothed mass difference, shared Silverman bandwidth";
  m.choices["analysis.standardization"] = "z-score";
  m.choices["control.matching"] = "article count";
  return m;
}

std::vector<Document> load_input(const PipelineConfig& config) {
  io::ReaderOptions options;
  options.lang = config.lang;
  options.strip_markup = config.strip_markup;
  auto docs = io::read_corpus(config.input, config.format, options);
  apply_default_lang(docs, config.lang);
  return docs;
}

PrimaryResult run_primary(const PipelineConfig& config, std::vector<Document> raw) {
  PrimaryResult result;
  result.manifest = new_manifest(config);
  result.manifest.wiki = wiki_code(config, raw);
  result.corpus = primary_stages(config, std::move(raw), result.manifest, result.verdicts);
  return result;
}

HeuristicResult run_heuristic(const PipelineConfig& config, std::vector<Document> primary,
                              Manifest manifest) {
  HeuristicResult result;
  result.corpus = std::move(primary);
  result.manifest = std::move(manifest);
  heuristic_stage(config, result);
  return result;
}

std::vector<Document> run_random_control(std::span<const Document> raw, std::size_t n_remove,
                                         std::uint64_t seed) {
  if (n_remove > raw.size()) {
    throw UsageError("random control: cannot remove " + std::to_string(n_remove) + " of " +
                     std::to_string(raw.size()) + " documents");
  }
  std::vector<bool> drop(raw.size(), false);
  for (std::size_t i : sample_indices(raw.size(), n_remove, seed)) drop[i] = true;
  std::vector<Document> out;
  out.reserve(raw.size() - n_remove);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!drop[i]) out.push_back(raw[i]);
  }
  return out;
}

std::size_t primary_removed_count(const Manifest& manifest) {
  const auto* first = manifest.stage(kStageScript);
  const auto* last = manifest.stage(kStageMinHash);
  if (!first || !last) {
    throw DataError("manifest for " + manifest.wiki + " is missing a primary stage");
  }
  return static_cast<std::size_t>(first->docs_before - last->docs_after);
}

PrimaryResult run_primary_files(const PipelineConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  const auto manifest_path = config.output_dir / "manifest.json";

  PrimaryResult result;
  result.manifest = new_manifest(config);
  try {
    auto raw = load_input(config);
    result.manifest.wiki = wiki_code(config, raw);
    result.corpus = primary_stages(config, std::move(raw), result.manifest, result.verdicts);
  } catch (const Error& e) {
    if (result.manifest.valid) {
      result.manifest.valid = false;
      result.manifest.error = e.what();
    }
    write_manifest(result.manifest, manifest_path);
    throw;
  }
  write_primary_outputs(config, result);
  write_manifest(result.manifest, manifest_path);
  check_complete(result.manifest);
  return result;
}

HeuristicResult run_heuristic_files(const PipelineConfig& config, const fs::path& input) {
  config.validate(false);
  if (!fs::exists(input)) throw UsageError("input does not exist: " + input.string());
  fs::create_directories(config.output_dir);
  const auto manifest_path = config.output_dir / "manifest.json";

  const auto beside = input.parent_path() / "manifest.json";
  Manifest manifest = fs::exists(beside) ? read_manifest(beside) : new_manifest(config);
  auto docs = io::read_corpus(input, io::CorpusFormat::Jsonl);
  if (manifest.wiki.empty()) manifest.wiki = wiki_code(config, docs);

  HeuristicResult result;
  result.corpus = std::move(docs);
  result.manifest = std::move(manifest);
  try {
    heuristic_stage(config, result);
  } catch (const Error&) {
    write_manifest(result.manifest, manifest_path);
    throw;
  }
  write_heuristic_outputs(config, result);
  write_manifest(result.manifest, manifest_path);
  check_complete(result.manifest);
  return result;
}

void run_all_files(const PipelineConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  const auto manifest_path = config.output_dir / "manifest.json";

  auto raw = load_input(config);
  PrimaryResult primary;
  primary.manifest = new_manifest(config);
  primary.manifest.wiki = wiki_code(config, raw);

  HeuristicResult heuristic;
  try {
    primary.corpus = primary_stages(config, raw, primary.manifest, primary.verdicts);
    write_primary_outputs(config, primary);
    heuristic.corpus = primary.corpus;
    heuristic.manifest = primary.manifest;
    heuristic_stage(config, heuristic);
  } catch (const Error& e) {
    auto& m = heuristic.manifest.stages.empty() ? primary.manifest : heuristic.manifest;
    if (m.valid) {
      m.valid = false;
      m.error = e.what();
    }
    write_manifest(m, manifest_path);
    throw;
  }
  write_heuristic_outputs(config, heuristic);

  const auto control =
      run_random_control(raw, primary_removed_count(primary.manifest), config.control_seed);
  io::write_corpus(control, config.output_dir / "random.jsonl");

  write_manifest(heuristic.manifest, manifest_path);
  check_complete(heuristic.manifest);

  ReportInputs report;
  report.manifests.push_back(heuristic.manifest);
  report.metric_tables[heuristic.manifest.wiki] = heuristic.scores;
  write_report(report, config.output_dir / "report");
}

}  // namespace wikiclean::pipeline
