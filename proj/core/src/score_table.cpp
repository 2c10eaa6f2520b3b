#include "wikiclean/score_table.hpp"

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/csv.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/parallel.hpp"

namespace wikiclean::heuristics {

std::string target_name(const ScoreTarget& target) {
  return std::visit(
      [](auto t) -> std::string {
        if constexpr (std::is_same_v<decltype(t), Family>) {
          return std::string(family_name(t));
        } else {
          return std::string(metric_name(t));
        }
      },
      target);
}

ScoreTarget parse_target(std::string_view name) {
  if (auto f = parse_family(name)) return *f;
  if (auto m = parse_metric(name)) return *m;
  throw UsageError("unknown family or metric: " + std::string(name));
}

ScoreTable::ScoreTable(std::vector<ScoreRow> rows) : rows_(std::move(rows)) {
  index_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!index_.emplace(rows_[i].doc_id, i).second) {
      throw DataError("duplicate doc_id in score table: " + rows_[i].doc_id);
    }
  }
}

const ScoreRow* ScoreTable::find(std::string_view doc_id) const {
  const auto it = index_.find(std::string(doc_id));
  return it == index_.end() ? nullptr : &rows_[it->second];
}

double ScoreTable::value(const ScoreRow& row, const ScoreTarget& target) {
  if (const auto* f = std::get_if<Family>(&target)) return row.families.get(*f);
  return row.metrics.value(std::get<Metric>(target));
}

std::vector<double> ScoreTable::column(const ScoreTarget& target) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(value(row, target));
  return out;
}

ScoreTable score_corpus(std::span<const Document> docs, const MetricOptions& metric_options,
                        const NormalizationOptions& normalization, unsigned workers) {
  std::vector<MetricVector> metrics(docs.size());
  parallel_for(docs.size(), workers,
               [&](std::size_t i) { metrics[i] = compute_metrics(docs[i], metric_options); });
  const auto families = family_scores(metrics, normalization);
  std::vector<ScoreRow> rows(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    rows[i] = ScoreRow{docs[i].id, metrics[i], families[i]};
  }
  return ScoreTable(std::move(rows));
}

std::string format_metric_csv(const ScoreTable& table) {
  std::vector<std::string> header = {"doc_id"};
  for (Metric m : kAllMetrics) header.emplace_back(metric_name(m));
  for (Family f : kAllFamilies) header.emplace_back(family_name(f));
  std::string out = csv::format_row(header);
  for (const auto& row : table.rows()) {
    std::vector<std::string> fields = {row.doc_id};
    for (Metric m : kAllMetrics) fields.push_back(csv::format_double(row.metrics.value(m)));
    for (Family f : kAllFamilies) fields.push_back(csv::format_double(row.families.get(f)));
    out += csv::format_row(fields);
  }
  return out;
}

void write_metric_csv(const ScoreTable& table, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_metric_csv(table));
}

ScoreTable parse_metric_csv(std::string_view text) {
  const auto parsed = csv::parse(text);
  const std::size_t id_col = parsed.require_column("doc_id");
  std::array<std::size_t, kMetricCount> metric_cols{};
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    metric_cols[k] = parsed.require_column(metric_name(kAllMetrics[k]));
  }
  std::array<std::size_t, kFamilyCount> family_cols{};
  for (std::size_t k = 0; k < kFamilyCount; ++k) {
    family_cols[k] = parsed.require_column(family_name(kAllFamilies[k]));
  }
  std::vector<ScoreRow> rows;
  rows.reserve(parsed.rows.size());
  for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto& fields = parsed.rows[r];
    ScoreRow row;
    row.doc_id = fields[id_col];
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      row.metrics.value(kAllMetrics[k]) =
          csv::parse_double(fields[metric_cols[k]], r + 2, parsed.header[metric_cols[k]]);
    }
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      row.families.scores[k] =
          csv::parse_double(fields[family_cols[k]], r + 2, parsed.header[family_cols[k]]);
    }
    rows.push_back(std::move(row));
  }
  return ScoreTable(std::move(rows));
}

ScoreTable read_metric_csv(const std::filesystem::path& path) {
  return parse_metric_csv(io::read_file(path));
}

}  // namespace wikiclean::heuristics
