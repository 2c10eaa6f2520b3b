#include "wikiclean/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/csv.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/thresholding.hpp"

namespace wikiclean::pipeline {
namespace {

namespace fs = std::filesystem;
using csv::format_double;

constexpr std::size_t kKdePoints = 200;

// File-name safe form of a wiki code.
std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "wiki" : out;
}

struct Histogram {
  double lo = 0;
  double width = 0;
  std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> values, std::size_t bins) {
  Histogram h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.width = (*mx > *mn) ? (*mx - *mn) / static_cast<double>(bins) : 1.0;
  if (*mx == *mn) bins = 1;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lo) / h.width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
         << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  void rect(double x, double y, double w, double h) {
    out_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
         << "\" fill=\"#4878a8\"/>\n";
  }
  void circle(double x, double y, int colour) {
    static constexpr const char* kPalette[] = {"#4878a8", "#e0823d", "#5aa05a", "#c44e52",
                                               "#8172b3", "#937860"};
    out_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\""
         << kPalette[static_cast<std::size_t>(colour) % 6] << "\"/>\n";
  }
  void text(double x, double y, std::string_view s) {
    out_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\">";
    for (char c : s) {
      if (c == '<') out_ << "&lt;";
      else if (c == '&') out_ << "&amp;";
      else out_ << c;
    }
    out_ << "</text>\n";
  }
  std::string str() { return out_.str() + "</svg>\n"; }
  double width() const { return w_; }
  double height() const { return h_; }

 private:
  double w_;
  double h_;
  std::ostringstream out_;
};

std::string histogram_svg(const Histogram& h, std::string_view title) {
  Svg svg(480, 280);
  const double plot_w = 440;
  const double plot_h = 230;
  const auto peak = *std::max_element(h.counts.begin(), h.counts.end());
  const double bar_w = plot_w / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double bh = peak ? plot_h * static_cast<double>(h.counts[i]) / static_cast<double>(peak) : 0;
    svg.rect(20 + bar_w * static_cast<double>(i), 250 - bh, std::max(bar_w - 1, 0.5), bh);
  }
  svg.text(20, 16, title);
  return svg.str();
}

std::string retention_svg(std::span<const analysis::RetentionPoint> points,
                          std::span<const int> tiers) {
  Svg svg(420, 420);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = 20 + 380 * std::clamp(points[i].frac_docs_retained, 0.0, 1.0);
    const double y = 400 - 380 * std::clamp(points[i].frac_chars_retained, 0.0, 1.0);
    svg.circle(x, y, tiers.empty() ? 0 : tiers[i]);
  }
  svg.text(20, 16, "docs retained (x) vs chars retained (y)");
  return svg.str();
}

void write(ReportSummary& summary, const fs::path& path, std::string_view content) {
  io::write_file_atomic(path, content);
  summary.files.push_back(path);
}

}  // namespace

void write_tiers_csv(std::span<const analysis::RetentionPoint> points,
                     const analysis::TierAssignment& tiers, const fs::path& path) {
  std::string text = csv::format_row({"wiki", "frac_docs_retained", "frac_chars_retained", "weight", "tier"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    text += csv::format_row({points[i].wiki, format_double(points[i].frac_docs_retained),
                             format_double(points[i].frac_chars_retained),
                             format_double(points[i].weight), std::to_string(tiers.tiers[i])});
  }
  io::write_file_atomic(path, text);
}

std::vector<analysis::RetentionPoint> read_retention_csv(const fs::path& path) {
  const auto table = csv::parse(io::read_file(path));
  const auto wiki = table.require_column("wiki");
  const auto docs = table.require_column("frac_docs_retained");
  const auto chars = table.require_column("frac_chars_retained");
  const auto weight = table.column_index("weight");
  std::vector<analysis::RetentionPoint> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    analysis::RetentionPoint p;
    p.wiki = row[wiki];
    p.frac_docs_retained = csv::parse_double(row[docs], r + 1, "frac_docs_retained");
    p.frac_chars_retained = csv::parse_double(row[chars], r + 1, "frac_chars_retained");
    p.weight = weight ? csv::parse_double(row[*weight], r + 1, "weight") : 1.0;
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::string, double> read_keyed_column(const fs::path& path, const std::string& key_column,
                                                const std::string& value_column) {
  const auto table = csv::parse(io::read_file(path));
  const auto key = table.require_column(key_column);
  const auto value = table.require_column(value_column);
  std::map<std::string, double> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!out.emplace(row[key], csv::parse_double(row[value], r + 1, value_column)).second) {
      throw DataError(path.string() + ": duplicate key " + row[key]);
    }
  }
  return out;
}

std::string format_correlations_json(const std::vector<NamedCorrelation>& items) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& item : items) {
    out.push_back(nlohmann::ordered_json{{"name", item.name},
                                         {"rho", item.value.rho},
                                         {"p_value", item.value.p_value},
                                         {"n", item.value.n}});
  }
  return out.dump(2) + "\n";
}

ReportSummary write_report(const ReportInputs& inputs, const fs::path& out_dir) {
  ReportSummary summary;
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<StageDelta>> by_wiki;
  std::map<std::string, const Manifest*> manifest_of;
  for (const auto& m : inputs.manifests) {
    if (!m.valid) {
      summary.notes.push_back("skipped invalid manifest for " + m.wiki + ": " + m.error);
      continue;
    }
    if (!by_wiki.emplace(m.wiki, m.stages).second) {
      summary.notes.push_back("duplicate manifest for " + m.wiki + " ignored");
      continue;
    }
    manifest_of[m.wiki] = &m;
  }
  if (by_wiki.empty()) throw DataError("report needs at least one completed manifest");

  const auto points = analysis::retention_table(by_wiki);
  {
    std::string text = csv::format_row({"wiki", "articles", "frac_docs_retained",
                                        "frac_chars_retained", "weight"});
    for (const auto& p : points) {
      const auto* first = manifest_of[p.wiki]->stage(kStageScript);
      text += csv::format_row({p.wiki, std::to_string(first->docs_before),
                               format_double(p.frac_docs_retained),
                               format_double(p.frac_chars_retained), format_double(p.weight)});
    }
    write(summary, out_dir / "retention.csv", text);
  }

  std::vector<int> tiers;
  if (points.size() < inputs.tiers.k) {
    summary.notes.push_back("tier clustering skipped: " + std::to_string(points.size()) +
                            " wikis for k = " + std::to_string(inputs.tiers.k));
  } else {
    try {
      const auto assignment = analysis::tier_cluster(points, inputs.tiers);
      write_tiers_csv(points, assignment, out_dir / "tiers.csv");
      summary.files.push_back(out_dir / "tiers.csv");
      std::string text = csv::format_row({"tier", "frac_docs_retained", "frac_chars_retained"});
      for (std::size_t t = 0; t < assignment.centroids.size(); ++t) {
        text += csv::format_row({std::to_string(t + 1), format_double(assignment.centroids[t][0]),
                                 format_double(assignment.centroids[t][1])});
      }
      write(summary, out_dir / "centroids.csv", text);
      tiers = assignment.tiers;
    } catch (const DataError& e) {
      summary.notes.push_back(std::string("tier clustering skipped: ") + e.what());
    }
  }
  if (inputs.svg) write(summary, out_dir / "retention.svg", retention_svg(points, tiers));

  if (!inputs.bot_ratios.empty()) {
    std::vector<double> bots;
    std::vector<double> removed;
    std::string text = csv::format_row({"wiki", "bot_ratio", "minhash_frac_removed"});
    for (const auto& [wiki, ratio] : inputs.bot_ratios) {
      const auto it = manifest_of.find(wiki);
      if (it == manifest_of.end()) {
        summary.notes.push_back("bot ratio for " + wiki + " has no manifest");
        continue;
      }
      const double frac = it->second->stage(kStageMinHash)->frac_docs_removed();
      bots.push_back(ratio);
      removed.push_back(frac);
      text += csv::format_row({wiki, format_double(ratio), format_double(frac)});
    }
    write(summary, out_dir / "bot_minhash.csv", text);
    try {
      const auto c = analysis::spearman(bots, removed);
      write(summary, out_dir / "correlations.json",
            format_correlations_json({{"bot_ratio~minhash_frac_removed", c}}));
    } catch (const DataError& e) {
      summary.notes.push_back(std::string("bot correlation skipped: ") + e.what());
    }
  }

  for (const auto& [wiki, table] : inputs.metric_tables) {
    if (table.empty()) continue;
    for (const auto family : heuristics::kAllFamilies) {
      const auto name = std::string(heuristics::family_name(family));
      const auto stem = slug(wiki) + "_" + name;
      auto values = table.column(family);
      std::sort(values.begin(), values.end());

      const auto h = histogram(values, std::max<std::size_t>(1, inputs.histogram_bins));
      std::string text = csv::format_row({"bin_lo", "bin_hi", "count", "density"});
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.lo + h.width * static_cast<double>(b);
        const double density = static_cast<double>(h.counts[b]) /
                               (static_cast<double>(values.size()) * h.width);
        text += csv::format_row({format_double(lo), format_double(lo + h.width),
                                 std::to_string(h.counts[b]), format_double(density)});
      }
      write(summary, out_dir / ("hist_" + stem + ".csv"), text);
      if (inputs.svg) write(summary, out_dir / ("hist_" + stem + ".svg"), histogram_svg(h, wiki + " " + name));

      const double bw = threshold::silverman_bandwidth(values, values.size());
      if (!(bw > 0)) {
        summary.notes.push_back("no KDE for " + wiki + " " + name + ": constant scores");
        continue;
      }
      const auto grid = threshold::linspace(values.front() - 3 * bw, values.back() + 3 * bw, kKdePoints);
      const auto density = threshold::kde(values, grid, bw);
      text = csv::format_row({"x", "density"});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        text += csv::format_row({format_double(grid[i]), format_double(density[i])});
      }
      write(summary, out_dir / ("kde_" + stem + ".csv"), text);
    }
  }

  std::string notes;
  for (const auto& n : summary.notes) notes += n + "\n";
  write(summary, out_dir / "report_notes.txt", notes);
  return summary;
}

}  // namespace wikiclean::pipeline
