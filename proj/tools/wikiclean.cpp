// wikiclean: Wikipedia corpus cleaning pipeline.

#include <array>
#include <charconv>
#include <deque>
#include <filesystem>
#include <map>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wikiclean/analysis.hpp"
#include "wikiclean/config.hpp"
#include "wikiclean/corpus_io.hpp"
#include "wikiclean/csv.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/manifest.hpp"
#include "wikiclean/parallel.hpp"
#include "wikiclean/pipeline.hpp"
#include "wikiclean/report.hpp"
#include "wikiclean/score_table.hpp"
#include "wikiclean/thresholding.hpp"

namespace fs = std::filesystem;
using namespace wikiclean;

namespace {

// Flags that mirror config keys. Unset flags leave the config value alone.
struct ConfigFlags {
  std::string config_file;
  // A deque so references handed to CLI11 survive later insertions.
  std::deque<std::pair<std::string, std::optional<std::string>>> values;
  std::vector<std::string> sides;
  std::vector<std::string> sets;

  std::optional<std::string>& slot(const std::string& key) {
    values.emplace_back(key, std::nullopt);
    return values.back().second;
  }
};

void add_option(CLI::App* cmd, ConfigFlags& flags, const std::string& name,
                const std::string& key, const std::string& help) {
  auto& slot = flags.slot(key);
  cmd->add_option(name, slot, help + " [" + key + "]");
}

void add_flag(CLI::App* cmd, ConfigFlags& flags, const std::string& name,
              const std::string& key, const std::string& value, const std::string& help) {
  auto& slot = flags.slot(key);
  cmd->add_flag_callback(name, [&slot, value] { slot = value; }, help + " [" + key + "]");
}

void add_input_flags(CLI::App* cmd, ConfigFlags& f) {
  add_option(cmd, f, "-i,--input", "input.path", "raw corpus file");
  add_option(cmd, f, "--format", "input.format", "jsonl or wiki-xml");
  add_option(cmd, f, "--lang", "input.lang", "language code");
  add_flag(cmd, f, "--strip-markup", "input.strip_markup", "true", "strip wikitext markup");
}

void add_primary_flags(CLI::App* cmd, ConfigFlags& f) {
  add_flag(cmd, f, "--no-script", "script.enabled", "false", "disable the script filter");
  add_option(cmd, f, "--registry", "script.registry", "script registry file");
  add_option(cmd, f, "--registry-overrides", "script.overrides", "registry overrides file");
  add_option(cmd, f, "--dedup-threshold", "dedup.threshold", "near-duplicate Jaccard threshold");
  add_option(cmd, f, "--permutations", "dedup.permutations", "MinHash permutations");
  add_option(cmd, f, "--bands", "dedup.bands", "LSH bands");
  add_option(cmd, f, "--rows", "dedup.rows", "LSH rows per band");
  add_option(cmd, f, "--shingle-width", "dedup.shingle_width", "words per shingle");
  add_option(cmd, f, "--dedup-seed", "dedup.seed", "MinHash seed");
  add_flag(cmd, f, "--exact-verify", "dedup.exact_verify", "true", "verify candidates by exact Jaccard");
}

void add_heuristic_flags(CLI::App* cmd, ConfigFlags& f) {
  add_flag(cmd, f, "--no-heuristic", "heuristic.enabled", "false", "disable heuristic pruning");
  add_option(cmd, f, "--trigram-unit", "heuristic.trigram_unit", "word or char");
  add_flag(cmd, f, "--per-metric", "heuristic.per_metric", "true", "threshold raw metrics");
  add_flag(cmd, f, "--skip-degenerate", "heuristic.skip_degenerate", "true",
           "skip degenerate targets with a warning");
  add_option(cmd, f, "--frac", "threshold.frac", "outlier sample fraction");
  add_option(cmd, f, "--threshold-seed", "threshold.seed", "background sample seed");
  cmd->add_option("--side", f.sides, "target=off|low|high|both [threshold.side.<target>]");
}

void add_common_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("-c,--config", f.config_file, "config file")->check(CLI::ExistingFile);
  add_option(cmd, f, "-o,--out", "output.dir", "output directory");
  add_option(cmd, f, "-j,--workers", "output.workers", "worker threads (default: all cores)");
  add_option(cmd, f, "--control-seed", "control.seed", "random control seed");
  cmd->add_option("--set", f.sets, "override any config key: section.key=value");
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError(std::string(what) + ": expected key=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

pipeline::PipelineConfig build_config(const ConfigFlags& f) {
  pipeline::PipelineConfig config;
  config.workers = default_workers();
  if (!f.config_file.empty()) {
    pipeline::apply_config_text(config, io::read_file(f.config_file));
  }
  for (const auto& s : f.sets) {
    const auto [key, value] = split_assignment(s, "--set");
    pipeline::set_config_value(config, key, value);
  }
  for (const auto& [key, value] : f.values) {
    if (value) pipeline::set_config_value(config, key, *value);
  }
  for (const auto& s : f.sides) {
    const auto [target, spec] = split_assignment(s, "--side");
    pipeline::set_config_value(config, "threshold.side." + target, spec);
  }
  return config;
}

void print_stages(const pipeline::Manifest& m) {
  for (const auto& d : m.stages) {
    std::cerr << d.stage_name << ": docs " << d.docs_before << " -> " << d.docs_after
              << ", chars " << d.chars_before << " -> " << d.chars_after << '\n';
  }
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Wikipedia corpus cleaning: script filter, deduplication, heuristic pruning"};
  app.set_version_flag("--version", std::string(pipeline::tool_version()));
  app.require_subcommand(1);

  ConfigFlags flags;

  // extract
  auto* extract = app.add_subcommand("extract", "convert a wiki XML dump to line-delimited JSON");
  std::string extract_in;
  std::string extract_out;
  std::string extract_lang;
  bool extract_strip = false;
  extract->add_option("-i,--input", extract_in, "XML dump")->required()->check(CLI::ExistingFile);
  extract->add_option("-o,--output", extract_out, "output .jsonl")->required();
  extract->add_option("--lang", extract_lang, "language code (default: from <dbname>)");
  extract->add_flag("--strip-markup", extract_strip, "strip wikitext markup");

  auto* primary = app.add_subcommand("primary", "script filter, exact and near-duplicate removal");
  add_common_flags(primary, flags);
  add_input_flags(primary, flags);
  add_primary_flags(primary, flags);

  auto* heuristic = app.add_subcommand("heuristic", "score, threshold and prune a primary corpus");
  add_common_flags(heuristic, flags);
  add_heuristic_flags(heuristic, flags);
  std::string heuristic_corpus;
  heuristic->add_option("--corpus", heuristic_corpus, "primary corpus (default: <out>/primary.jsonl)");

  auto* run_all = app.add_subcommand("run-all", "primary, heuristic, random control and report");
  add_common_flags(run_all, flags);
  add_input_flags(run_all, flags);
  add_primary_flags(run_all, flags);
  add_heuristic_flags(run_all, flags);

  // random-control
  auto* control = app.add_subcommand("random-control", "remove n uniformly random articles");
  std::string control_in;
  std::string control_out;
  std::string control_manifest;
  std::optional<std::size_t> control_n;
  std::uint64_t control_seed = 1;
  control->add_option("-i,--input", control_in, "raw corpus (.jsonl)")->required()->check(CLI::ExistingFile);
  control->add_option("-o,--output", control_out, "output .jsonl")->required();
  auto* n_opt = control->add_option("-n,--remove", control_n, "articles to remove");
  control->add_option("--manifest", control_manifest, "take n from a primary manifest")
      ->check(CLI::ExistingFile)
      ->excludes(n_opt);
  control->add_option("--seed", control_seed, "sampling seed");

  // score
  auto* score = app.add_subcommand("score", "per-document metrics and family scores");
  std::string score_in;
  std::string score_out;
  std::string score_unit = "word";
  unsigned score_workers = default_workers();
  score->add_option("-i,--input", score_in, "corpus (.jsonl)")->required()->check(CLI::ExistingFile);
  score->add_option("-o,--output", score_out, "metrics CSV")->required();
  score->add_option("--trigram-unit", score_unit, "word or char");
  score->add_option("-j,--workers", score_workers, "worker threads")->check(CLI::Range(1u, 4096u));

  // threshold
  auto* thresh = app.add_subcommand("threshold", "select a threshold for one score column");
  std::string thresh_in;
  std::string thresh_out;
  std::string thresh_target = "entropy";
  std::string thresh_side = "low";
  double thresh_frac = 0.05;
  std::uint64_t thresh_seed = 1;
  thresh->add_option("-i,--input", thresh_in, "metrics CSV")->required()->check(CLI::ExistingFile);
  thresh->add_option("-o,--output", thresh_out, "thresholds JSON (default: stdout)");
  thresh->add_option("--target", thresh_target, "family or metric name");
  thresh->add_option("--side", thresh_side, "low or high");
  thresh->add_option("--frac", thresh_frac, "outlier sample fraction");
  thresh->add_option("--seed", thresh_seed, "background sample seed");

  // tier
  auto* tier = app.add_subcommand("tier", "cluster wikis into retention tiers");
  std::string tier_retention;
  std::vector<std::string> tier_manifests;
  std::string tier_out;
  analysis::TierOptions tier_options;
  bool tier_unweighted = false;
  auto* ret_opt = tier->add_option("--retention", tier_retention, "retention CSV")->check(CLI::ExistingFile);
  tier->add_option("--manifest", tier_manifests, "manifest files")->check(CLI::ExistingFile)->excludes(ret_opt);
  tier->add_option("-o,--output", tier_out, "tiers CSV")->required();
  tier->add_option("-k", tier_options.k, "number of tiers");
  tier->add_option("--seed", tier_options.seed, "k-means seed");
  tier->add_option("--restarts", tier_options.restarts, "k-means restarts");
  tier->add_flag("--unweighted", tier_unweighted, "ignore article counts");

  // depth
  auto* depth = app.add_subcommand("depth", "Depth+ from edit statistics");
  std::string depth_in;
  std::string depth_out;
  depth->add_option("-i,--input", depth_in,
                    "CSV: wiki,editors,edits,total_pages,articles,non_articles")
      ->required()
      ->check(CLI::ExistingFile);
  depth->add_option("-o,--output", depth_out, "output CSV (default: stdout)");

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Spearman correlation of two keyed columns");
  std::string corr_x;
  std::string corr_y;
  std::string corr_x_col;
  std::string corr_y_col;
  std::string corr_key = "wiki";
  std::string corr_out;
  correlate->add_option("--x", corr_x, "first CSV")->required()->check(CLI::ExistingFile);
  correlate->add_option("--x-column", corr_x_col, "column in the first CSV")->required();
  correlate->add_option("--y", corr_y, "second CSV")->required()->check(CLI::ExistingFile);
  correlate->add_option("--y-column", corr_y_col, "column in the second CSV")->required();
  correlate->add_option("--key", corr_key, "join column");
  correlate->add_option("-o,--output", corr_out, "output JSON (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "retention, tier, bot and distribution reports");
  std::vector<std::string> report_manifests;
  std::vector<std::string> report_metrics;
  std::string report_bots;
  std::string report_bot_column = "bot_ratio";
  std::string report_out = "report";
  pipeline::ReportInputs report_inputs;
  report->add_option("--manifest", report_manifests, "manifest files")->required()->check(CLI::ExistingFile);
  report->add_option("--metrics", report_metrics, "wiki=metrics.csv");
  report->add_option("--bot-ratios", report_bots, "CSV with wiki,bot_ratio")->check(CLI::ExistingFile);
  report->add_option("--bot-column", report_bot_column, "bot ratio column name");
  report->add_option("-o,--out", report_out, "output directory");
  report->add_option("--bins", report_inputs.histogram_bins, "histogram bins");
  report->add_option("--seed", report_inputs.tiers.seed, "tier clustering seed");
  report->add_flag("--svg", report_inputs.svg, "also write SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  if (extract->parsed()) {
    io::ReaderOptions options;
    options.lang = extract_lang;
    options.strip_markup = extract_strip;
    io::CorpusReader reader(extract_in, io::CorpusFormat::WikiXml, options);
    io::CorpusWriter writer(extract_out);
    while (auto doc = reader.next()) writer.write(*doc);
    const auto stats = writer.commit();
    const auto& x = reader.extract_stats();
    std::cerr << "pages " << x.pages_seen << ", articles " << x.pages_emitted
              << ", skipped namespace " << x.skipped_namespace << ", skipped empty "
              << x.skipped_no_text << ", chars " << stats.char_count << '\n';
    return 0;
  }
  if (primary->parsed()) {
    const auto result = pipeline::run_primary_files(build_config(flags));
    print_stages(result.manifest);
    return 0;
  }
  if (heuristic->parsed()) {
    const auto config = build_config(flags);
    const fs::path corpus =
        heuristic_corpus.empty() ? config.output_dir / "primary.jsonl" : fs::path(heuristic_corpus);
    const auto result = pipeline::run_heuristic_files(config, corpus);
    print_stages(result.manifest);
    return 0;
  }
  if (run_all->parsed()) {
    const auto config = build_config(flags);
    pipeline::run_all_files(config);
    print_stages(pipeline::read_manifest(config.output_dir / "manifest.json"));
    return 0;
  }
  if (control->parsed()) {
    std::size_t n = 0;
    if (control_n) {
      n = *control_n;
    } else if (!control_manifest.empty()) {
      n = pipeline::primary_removed_count(pipeline::read_manifest(control_manifest));
    } else {
      throw UsageError("random-control needs --remove or --manifest");
    }
    const auto raw = io::read_corpus(control_in, io::CorpusFormat::Jsonl);
    io::write_corpus(pipeline::run_random_control(raw, n, control_seed), control_out);
    return 0;
  }
  if (score->parsed()) {
    const auto docs = io::read_corpus(score_in, io::CorpusFormat::Jsonl);
    if (docs.empty()) throw DataError("no documents to score");
    const auto table = heuristics::score_corpus(docs, {heuristics::parse_trigram_unit(score_unit)},
                                                {}, score_workers);
    heuristics::write_metric_csv(table, score_out);
    return 0;
  }
  if (thresh->parsed()) {
    const auto table = heuristics::read_metric_csv(thresh_in);
    const auto target = heuristics::parse_target(thresh_target);
    const auto t = threshold::select_threshold(table.column(target), threshold::parse_side(thresh_side),
                                               thresh_frac, thresh_seed,
                                               heuristics::target_name(target));
    const threshold::Threshold one[] = {t};
    const auto json = threshold::format_thresholds_json(one);
    if (thresh_out.empty()) {
      std::cout << json;
    } else {
      io::write_file_atomic(thresh_out, json);
      std::cerr << t.target << ' ' << threshold::side_name(t.side) << " cut " << t.cut << '\n';
    }
    return 0;
  }
  if (tier->parsed()) {
    std::vector<analysis::RetentionPoint> points;
    if (!tier_retention.empty()) {
      points = pipeline::read_retention_csv(tier_retention);
    } else if (!tier_manifests.empty()) {
      std::map<std::string, std::vector<StageDelta>> by_wiki;
      for (const auto& path : tier_manifests) {
        auto m = pipeline::read_manifest(path);
        if (!by_wiki.emplace(m.wiki, std::move(m.stages)).second) {
          throw DataError("duplicate manifest for wiki " + m.wiki);
        }
      }
      points = analysis::retention_table(by_wiki);
    } else {
      throw UsageError("tier needs --retention or --manifest");
    }
    tier_options.weighted = !tier_unweighted;
    const auto assignment = analysis::tier_cluster(points, tier_options);
    pipeline::write_tiers_csv(points, assignment, tier_out);
    return 0;
  }
  if (depth->parsed()) {
    const auto table = csv::parse(io::read_file(depth_in));
    const auto col = [&](const char* name) { return table.require_column(name); };
    const auto wiki = col("wiki");
    const std::array<std::size_t, 5> fields = {col("editors"), col("edits"), col("total_pages"),
                                               col("articles"), col("non_articles")};
    std::string text = csv::format_row({"wiki", "depth_plus"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      std::array<std::uint64_t, 5> v{};
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& cell = table.rows[r][fields[i]];
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[i]);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
          throw DataError("record " + std::to_string(r + 1) + ": bad count '" + cell + "'");
        }
      }
      const double d = analysis::depth_plus({v[0], v[1], v[2], v[3], v[4]});
      text += csv::format_row({table.rows[r][wiki], csv::format_double(d)});
    }
    if (depth_out.empty()) std::cout << text;
    else io::write_file_atomic(depth_out, text);
    return 0;
  }
  if (correlate->parsed()) {
    const auto xs = pipeline::read_keyed_column(corr_x, corr_key, corr_x_col);
    const auto ys = pipeline::read_keyed_column(corr_y, corr_key, corr_y_col);
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [key, value] : xs) {
      if (const auto it = ys.find(key); it != ys.end()) {
        x.push_back(value);
        y.push_back(it->second);
      }
    }
    const auto c = analysis::spearman(x, y);
    const auto json = pipeline::format_correlations_json({{corr_x_col + "~" + corr_y_col, c}});
    if (corr_out.empty()) std::cout << json;
    else io::write_file_atomic(corr_out, json);
    return 0;
  }
  if (report->parsed()) {
    for (const auto& path : report_manifests) report_inputs.manifests.push_back(pipeline::read_manifest(path));
    for (const auto& spec : report_metrics) {
      const auto [wiki, path] = split_assignment(spec, "--metrics");
      report_inputs.metric_tables[wiki] = heuristics::read_metric_csv(path);
    }
    if (!report_bots.empty()) {
      report_inputs.bot_ratios = pipeline::read_keyed_column(report_bots, "wiki", report_bot_column);
    }
    const auto summary = pipeline::write_report(report_inputs, report_out);
    for (const auto& note : summary.notes) std::cerr << "note: " << note << '\n';
    return 0;
  }
  return static_cast<int>(ErrorKind::Usage);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "wikiclean: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "wikiclean: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Data);
  }
}
