#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "wikiclean/document.hpp"
#include "wikiclean/heuristics.hpp"

namespace wikiclean::heuristics {

/// What a threshold is applied to: a family score or a raw metric.
using ScoreTarget = std::variant<Family, Metric>;

std::string target_name(const ScoreTarget& target);
/// Accepts family names and metric names. Throws UsageError otherwise.
ScoreTarget parse_target(std::string_view name);

struct ScoreRow {
  std::string doc_id;
  MetricVector metrics;
  FamilyScores families;
};

/// The per-document metric table: raw metrics plus family scores.
class ScoreTable {
 public:
  ScoreTable() = default;
  explicit ScoreTable(std::vector<ScoreRow> rows);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<ScoreRow>& rows() const { return rows_; }
  const ScoreRow* find(std::string_view doc_id) const;

  std::vector<double> column(const ScoreTarget& target) const;
  static double value(const ScoreRow& row, const ScoreTarget& target);

 private:
  std::vector<ScoreRow> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

ScoreTable score_corpus(std::span<const Document> docs,
                        const MetricOptions& metric_options = {},
                        const NormalizationOptions& normalization = {},
                        unsigned workers = 1);

/// CSV with header doc_id, the seven metrics, then the three family scores.
void write_metric_csv(const ScoreTable& table, const std::filesystem::path& path);
std::string format_metric_csv(const ScoreTable& table);
ScoreTable read_metric_csv(const std::filesystem::path& path);
ScoreTable parse_metric_csv(std::string_view text);

}  // namespace wikiclean::heuristics
