#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wikiclean/config.hpp"
#include "wikiclean/dedup.hpp"
#include "wikiclean/document.hpp"
#include "wikiclean/manifest.hpp"
#include "wikiclean/score_table.hpp"
#include "wikiclean/thresholding.hpp"

namespace wikiclean::pipeline {

struct PrimaryResult {
  std::vector<Document> corpus;
  /// Exact-dedup verdicts followed by MinHash verdicts for the survivors.
  std::vector<dedup::DedupVerdict> verdicts;
  Manifest manifest;
};

/// Script filter, exact dedup, then MinHash dedup, in memory.
PrimaryResult run_primary(const PipelineConfig& config,
                          std::vector<Document> raw);

struct HeuristicResult {
  std::vector<Document> corpus;
  std::vector<Document> removed;
  heuristics::ScoreTable scores;
  std::vector<threshold::Threshold> thresholds;
  Manifest manifest;
};

/// Metrics, family scores, automatic thresholds and pruning. Appends one
/// stage and the threshold records to `manifest`.
HeuristicResult run_heuristic(const PipelineConfig& config,
                              std::vector<Document> primary, Manifest manifest);

/// Removes `n_remove` uniformly chosen documents, keeping input order.
/// Throws UsageError when n_remove exceeds the corpus size.
std::vector<Document> run_random_control(std::span<const Document> raw,
                                         std::size_t n_remove,
                                         std::uint64_t seed);

/// Number of articles removed by primary filtering, per the manifest.
std::size_t primary_removed_count(const Manifest& manifest);

Manifest new_manifest(const PipelineConfig& config);

// File-level drivers used by the CLI. Outputs go under config.output_dir.

std::vector<Document> load_input(const PipelineConfig& config);

/// Writes primary.jsonl, verdicts.jsonl and manifest.json.
PrimaryResult run_primary_files(const PipelineConfig& config);

/// Reads `input` (usually primary.jsonl) and the manifest beside it when
/// present; writes heuristic.jsonl, metrics.csv, thresholds.json and the
/// updated manifest.json.
HeuristicResult run_heuristic_files(const PipelineConfig& config,
                                    const std::filesystem::path& input);

/// Primary, heuristic, and the random control partition, plus the single-wiki
/// report bundle.
void run_all_files(const PipelineConfig& config);

}  // namespace wikiclean::pipeline
