#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wikiclean/analysis.hpp"
#include "wikiclean/manifest.hpp"
#include "wikiclean/score_table.hpp"

namespace wikiclean::pipeline {

struct ReportInputs {
  std::vector<Manifest> manifests;
  /// Metric tables keyed by wiki code.
  std::map<std::string, heuristics::ScoreTable> metric_tables;
  /// Wiki code -> externally estimated fraction of bot-generated articles.
  std::map<std::string, double> bot_ratios;
  analysis::TierOptions tiers;
  std::size_t histogram_bins = 40;
  bool svg = false;
};

struct ReportSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
};

/// Writes retention.csv, tiers.csv + centroids.csv (when enough wikis),
/// bot_minhash.csv + correlations.json (when bot ratios are given), and
/// per-family histogram and KDE CSVs under `out_dir`; notes go to
/// report_notes.txt.
ReportSummary write_report(const ReportInputs& inputs,
                           const std::filesystem::path& out_dir);

/// Reads a `wiki,<column>` CSV into a map.
std::map<std::string, double> read_keyed_column(const std::filesystem::path& path,
                                                const std::string& key_column,
                                                const std::string& value_column);

void write_tiers_csv(std::span<const analysis::RetentionPoint> points,
                     const analysis::TierAssignment& tiers,
                     const std::filesystem::path& path);

std::vector<analysis::RetentionPoint> read_retention_csv(
    const std::filesystem::path& path);

struct NamedCorrelation {
  std::string name;
  analysis::Correlation value;
};
std::string format_correlations_json(const std::vector<NamedCorrelation>& items);

}  // namespace wikiclean::pipeline
