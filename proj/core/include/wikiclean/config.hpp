#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/dedup.hpp"
#include "wikiclean/heuristics.hpp"

namespace wikiclean::pipeline {

/// Which tails of one score distribution get a threshold.
enum class SideSpec { Off, Low, High, Both };
std::string_view side_spec_name(SideSpec spec);
SideSpec parse_side_spec(std::string_view name);

struct HeuristicConfig {
  bool enabled = true;
  heuristics::TrigramUnit trigram_unit = heuristics::TrigramUnit::Word;
  /// Threshold raw metrics instead of family scores.
  bool per_metric = false;
  /// Skip a degenerate family with a warning instead of failing.
  bool skip_degenerate = false;
  double frac = 0.05;
  std::uint64_t seed = 1;
  /// Keyed by family (or metric, in per-metric mode). Missing keys are Low.
  std::map<std::string, SideSpec, std::less<>> sides;

  SideSpec side_for(std::string_view target) const;
};

struct PipelineConfig {
  std::filesystem::path input;
  io::CorpusFormat format = io::CorpusFormat::Jsonl;
  std::string lang;
  bool strip_markup = false;

  bool script_enabled = true;
  /// Empty means the built-in registry.
  std::filesystem::path registry;
  /// Optional per-language overrides applied on top of `registry`.
  std::filesystem::path registry_overrides;

  dedup::MinHashParams dedup;
  HeuristicConfig heuristic;

  std::uint64_t control_seed = 1;
  std::filesystem::path output_dir = "out";
  unsigned workers = 1;

  /// Throws UsageError naming the offending key.
  void validate(bool require_input = true) const;
};

/// Applies `[section]` / `key = value` text on top of `config`. Unknown keys
/// are a UsageError.
void apply_config_text(PipelineConfig& config, std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Sets one flattened key such as "dedup.threshold" or "threshold.side.entropy".
void set_config_value(PipelineConfig& config, std::string_view key,
                      std::string_view value);

/// Every effective setting as flattened key -> value, for manifests.
std::map<std::string, std::string> config_snapshot(const PipelineConfig& config);

}  // namespace wikiclean::pipeline
