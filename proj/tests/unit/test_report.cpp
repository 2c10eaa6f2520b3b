#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/report.hpp"

using namespace wikiclean;
using namespace wikiclean::pipeline;
namespace fs = std::filesystem;
namespace gen = wikiclean::testing;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           (std::string("wikiclean_report_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Manifest manifest_for(const std::string& wiki, std::vector<StageDelta> stages) {
  Manifest m;
  m.wiki = wiki;
  m.stages = std::move(stages);
  return m;
}

}  // namespace

TEST(Report, SingleWikiRetentionRow) {
  TempDir dir;
  ReportInputs in;
  in.manifests.push_back(manifest_for("yo", gen::primary_deltas(1000, 1000000, 0.7, 0.9)));
  const auto summary = write_report(in, dir.path);
  const auto rows = read_retention_csv(dir.path / "retention.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].wiki, "yo");
  EXPECT_DOUBLE_EQ(rows[0].frac_docs_retained, 0.7);
  EXPECT_DOUBLE_EQ(rows[0].frac_chars_retained, 0.9);
  EXPECT_EQ(rows[0].weight, 1000);
  EXPECT_FALSE(fs::exists(dir.path / "tiers.csv"));
}

TEST(Report, TwoWikisSkipTieringWithNote) {
  TempDir dir;
  ReportInputs in;
  in.manifests.push_back(manifest_for("yo", gen::primary_deltas(1000, 100000, 0.7, 0.9)));
  in.manifests.push_back(manifest_for("ig", gen::primary_deltas(500, 50000, 0.5, 0.6)));
  const auto summary = write_report(in, dir.path);
  ASSERT_FALSE(summary.notes.empty());
  EXPECT_NE(summary.notes[0].find("tier clustering skipped: 2 wikis for k = 4"), std::string::npos);
  EXPECT_NE(slurp(dir.path / "report_notes.txt").find("tier clustering skipped"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir.path / "tiers.csv"));
  EXPECT_EQ(read_retention_csv(dir.path / "retention.csv").size(), 2u);
}

TEST(Report, PlantedRegimesRecoveredInTierCsv) {
  TempDir dir;
  const auto planted = gen::planted_regimes(21, 300);
  ReportInputs in;
  for (const auto& [wiki, stages] : planted.manifests) in.manifests.push_back(manifest_for(wiki, stages));
  write_report(in, dir.path);
  const auto tiers = read_keyed_column(dir.path / "tiers.csv", "wiki", "tier");
  ASSERT_EQ(tiers.size(), 300u);
  std::vector<int> got, truth;
  for (const auto& [wiki, tier] : tiers) {
    got.push_back(static_cast<int>(tier));
    truth.push_back(planted.regime.at(wiki));
  }
  EXPECT_DOUBLE_EQ(oracle::adjusted_rand_index(got, truth), 1.0);
  EXPECT_TRUE(fs::exists(dir.path / "centroids.csv"));
}

TEST(Report, BotCorrelation) {
  TempDir dir;
  gen::Gen g(3);
  ReportInputs in;
  for (int i = 0; i < 40; ++i) {
    const double bot = g.unit();
    const double removed = std::clamp(0.05 + 0.6 * bot + g.normal(0, 0.05), 0.0, 0.95);
    const std::string wiki = "w" + std::to_string(i);
    std::vector<StageDelta> s = {{"script", 10000, 10000, 1000000, 1000000},
                                 {"exact-dedup", 10000, 10000, 1000000, 1000000},
                                 {"minhash-dedup", 10000, static_cast<std::uint64_t>(10000 * (1 - removed)),
                                  1000000, 900000}};
    in.manifests.push_back(manifest_for(wiki, s));
    in.bot_ratios[wiki] = bot;
  }
  in.bot_ratios["ghost"] = 0.5;
  const auto summary = write_report(in, dir.path);
  const auto json = slurp(dir.path / "correlations.json");
  EXPECT_NE(json.find("\"rho\""), std::string::npos);
  EXPECT_NE(json.find("\"n\": 40"), std::string::npos);
  EXPECT_EQ(read_keyed_column(dir.path / "bot_minhash.csv", "wiki", "bot_ratio").size(), 40u);
  bool noted = false;
  for (const auto& n : summary.notes) noted |= n.find("ghost") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Report, HistogramAndKdeFiles) {
  TempDir dir;
  ReportInputs in;
  in.manifests.push_back(manifest_for("yo", gen::primary_deltas(100, 10000, 0.9, 0.9)));
  std::vector<heuristics::ScoreRow> rows;
  gen::Gen g(4);
  for (int i = 0; i < 50; ++i) {
    heuristics::ScoreRow r;
    r.doc_id = std::to_string(i);
    r.families.get(heuristics::Family::Absolute) = g.uniform(0, 3);
    r.families.get(heuristics::Family::Relative) = g.uniform(0, 2);
    rows.push_back(r);
  }
  in.metric_tables["yo"] = heuristics::ScoreTable(rows);
  in.histogram_bins = 10;
  in.svg = true;
  const auto summary = write_report(in, dir.path);
  const auto hist = slurp(dir.path / "hist_yo_absolute.csv");
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 11);
  const auto kde = slurp(dir.path / "kde_yo_absolute.csv");
  EXPECT_EQ(std::count(kde.begin(), kde.end(), '\n'), 201);
  EXPECT_TRUE(fs::exists(dir.path / "hist_yo_absolute.svg"));
  EXPECT_FALSE(fs::exists(dir.path / "kde_yo_entropy.csv"));
  bool noted = false;
  for (const auto& n : summary.notes) noted |= n.find("no KDE for yo entropy") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Report, NeedsACompletedManifest) {
  TempDir dir;
  ReportInputs in;
  EXPECT_THROW(write_report(in, dir.path), DataError);
  auto m = manifest_for("yo", gen::primary_deltas(10, 100, 1, 1));
  m.valid = false;
  in.manifests.push_back(m);
  EXPECT_THROW(write_report(in, dir.path), DataError);
}

TEST(Report, Deterministic) {
  TempDir dir;
  const auto planted = gen::planted_regimes(5, 40);
  ReportInputs in;
  for (const auto& [wiki, stages] : planted.manifests) in.manifests.push_back(manifest_for(wiki, stages));
  write_report(in, dir.path / "a");
  std::reverse(in.manifests.begin(), in.manifests.end());
  write_report(in, dir.path / "b");
  for (const char* f : {"retention.csv", "tiers.csv", "centroids.csv"}) {
    EXPECT_EQ(slurp(dir.path / "a" / f), slurp(dir.path / "b" / f)) << f;
  }
}
