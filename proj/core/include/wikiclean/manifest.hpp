#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/dedup.hpp"
#include "wikiclean/document.hpp"

namespace wikiclean::pipeline {

inline constexpr std::string_view kStageScript = "script";
inline constexpr std::string_view kStageExact = "exact-dedup";
inline constexpr std::string_view kStageMinHash = "minhash-dedup";
inline constexpr std::string_view kStageHeuristic = "heuristic-prune";

std::string_view tool_version();

struct ThresholdRecord {
  std::string target;
  std::string side;
  double cut = 0;
  double frac = 0;
  std::size_t n_docs = 0;
  std::size_t n_sample = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0;
  bool per_metric = false;
  /// Set when a degenerate target was skipped instead of thresholded.
  std::string skipped_reason;

  friend bool operator==(const ThresholdRecord&, const ThresholdRecord&) = default;
};

/// Machine-readable record of one run over one wiki.
struct Manifest {
  std::string tool_version;
  std::string wiki;
  std::map<std::string, std::string> config;
  std::vector<StageDelta> stages;
  std::optional<dedup::MinHashParams> dedup;
  std::vector<ThresholdRecord> thresholds;
  /// Recorded modelling choices, e.g. retention of Common-script characters.
  std::map<std::string, std::string> choices;
  std::vector<std::string> warnings;
  bool valid = true;
  std::string error;

  const StageDelta* stage(std::string_view name) const;
};

std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view json);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Stage order script -> exact-dedup -> minhash-dedup -> heuristic-prune
/// (any prefix or subset in that order), counts never growing within or
/// across stages. Throws DataError describing the first violation.
void validate_manifest(const Manifest& manifest);

/// Appends stage records to the "stages" array of an existing manifest file,
/// creating the file when absent.
void append_stage_deltas(const std::filesystem::path& path,
                         const std::vector<StageDelta>& deltas);

}  // namespace wikiclean::pipeline
