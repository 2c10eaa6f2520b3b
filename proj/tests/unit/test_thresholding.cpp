#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/thresholding.hpp"

using namespace wikiclean;
using namespace wikiclean::threshold;
namespace gen = wikiclean::testing;

namespace {

heuristics::ScoreTable relative_table(const std::vector<double>& scores) {
  std::vector<heuristics::ScoreRow> rows;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    heuristics::ScoreRow r;
    r.doc_id = std::to_string(i);
    r.families.get(heuristics::Family::Relative) = scores[i];
    rows.push_back(r);
  }
  return heuristics::ScoreTable(std::move(rows));
}

std::vector<Document> docs_for(std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back({std::to_string(i), "", "text", "yo"});
  return docs;
}

Threshold low_cut(double cut) {
  Threshold t;
  t.target = "relative";
  t.side = Side::Low;
  t.cut = cut;
  return t;
}

std::vector<double> random_values(gen::Gen& g, std::size_t n) {
  std::vector<double> v(n);
  const int shape = static_cast<int>(g.below(3));
  for (auto& x : v) {
    if (shape == 0) x = g.uniform(0, 3);
    else if (shape == 1) x = g.chance(0.1) ? g.normal(0, 0.2) : g.normal(2, 0.5);
    else x = std::round(g.uniform(0, 6));  // heavy ties
  }
  return v;
}

}  // namespace

TEST(Kde, SinglePoint) {
  const std::vector<double> s = {0.0}, x = {0.0};
  EXPECT_NEAR(kde(s, x, 1.0)[0], 1.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
}

TEST(Kde, SymmetricPair) {
  const std::vector<double> s = {-1.0, 1.0}, x = {0.0};
  const double phi1 = std::exp(-0.5) / std::sqrt(2 * std::numbers::pi);
  EXPECT_NEAR(kde(s, x, 1.0)[0], phi1, 1e-15);
}

TEST(Kde, MatchesDirectSummation) {
  gen::Gen g(1);
  std::vector<double> s(1000);
  for (auto& v : s) v = g.chance(0.3) ? g.normal(-2, 0.5) : g.normal(3, 1.5);
  std::vector<double> x;
  for (int i = 0; i < 60; ++i) x.push_back(g.uniform(-6, 9));
  for (bool sorted : {false, true}) {
    if (sorted) std::sort(s.begin(), s.end());
    const auto d = kde(s, x, 0.37);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(d[i], oracle::gaussian_pdf_kde(s, x[i], 0.37), 1e-10);
      EXPECT_GE(d[i], 0.0);
    }
  }
}

TEST(Kde, MassBelowMatchesDirectSummation) {
  gen::Gen g(2);
  std::vector<double> s(500);
  for (auto& v : s) v = g.normal(0, 1);
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 40; ++i) {
    const double x = g.uniform(-5, 5);
    const std::vector<double> p = {x};
    EXPECT_NEAR(kde_mass_below(s, p, 0.2)[0], oracle::gaussian_cdf_mass(s, x, 0.2), 1e-12);
  }
}

TEST(Kde, RejectsBadArguments) {
  const std::vector<double> s = {1.0}, empty;
  EXPECT_THROW(kde(empty, s, 1.0), UsageError);
  EXPECT_THROW(kde(s, s, 0.0), UsageError);
}

TEST(Bandwidth, FloorAndConstant) {
  const std::vector<double> c = {2, 2, 2};
  EXPECT_EQ(silverman_bandwidth(c, 3), 0.0);
  // IQR is zero here, so the rule falls back to the standard deviation.
  const std::vector<double> v = {0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  EXPECT_GT(silverman_bandwidth(v, 10), 0.0);
}

TEST(SampleSize, FivePercentRule) {
  EXPECT_EQ(sample_size(10000, 0.05), 500u);
  EXPECT_EQ(sample_size(60, 0.05), 3u);
  EXPECT_EQ(sample_size(19, 0.05), 19u);
  EXPECT_EQ(sample_size(20, 0.05), 1u);
  EXPECT_THROW(sample_size(10, 0.0), UsageError);
  EXPECT_THROW(sample_size(10, 1.5), UsageError);
}

TEST(Linspace, ExactEndpoints) {
  const auto g = linspace(0.1, 0.7, 7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g.back(), 0.7);
  EXPECT_EQ(linspace(3, 4, 1), std::vector<double>{3});
}

TEST(Inputs, ShapeInvariants) {
  gen::Gen g(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = random_values(g, 2 + g.below(800));
    for (Side side : {Side::Low, Side::High}) {
      ThresholdInputs in;
      try {
        in = threshold_inputs(v, side, 0.05, trial);
      } catch (const DegenerateError&) {
        continue;
      }
      EXPECT_GE(in.n_sample, 1u);
      EXPECT_EQ(in.value_sample.size(), in.n_sample);
      EXPECT_EQ(in.background_sample.size(), in.n_sample);
      EXPECT_TRUE(std::is_sorted(in.values.begin(), in.values.end()));
      if (side == Side::Low) {
        EXPECT_TRUE(std::equal(in.value_sample.begin(), in.value_sample.end(), in.values.begin()));
        EXPECT_EQ(in.grid_lo, in.value_sample.front());
        EXPECT_EQ(in.grid_hi, in.background_sample.back());
      } else {
        EXPECT_TRUE(std::equal(in.value_sample.rbegin(), in.value_sample.rend(), in.values.rbegin()));
        EXPECT_EQ(in.grid_lo, in.background_sample.front());
        EXPECT_EQ(in.grid_hi, in.value_sample.back());
      }
      for (double x : in.background_sample) {
        EXPECT_TRUE(std::binary_search(in.values.begin(), in.values.end(), x));
      }
    }
  }
}

TEST(Select, DegenerateDistribution) {
  const std::vector<double> v(50, 0.3);
  try {
    select_threshold(v, Side::Low);
    FAIL() << "expected an error";
  } catch (const DegenerateError& e) {
    EXPECT_STREQ(e.what(), "degenerate distribution; no threshold");
  }
  EXPECT_THROW(select_threshold(std::vector<double>{1.0}, Side::Low), DegenerateError);
  EXPECT_THROW(select_threshold(std::vector<double>{1.0, NAN}, Side::Low), DataError);
}

TEST(Select, UniformCutWithinContractInterval) {
  gen::Gen g(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<double> v(2000);
    for (auto& x : v) x = g.unit();
    for (Side side : {Side::Low, Side::High}) {
      const auto t = select_threshold(v, side, 0.05, seed);
      const auto in = threshold_inputs(v, side, 0.05, seed);
      EXPECT_GE(t.cut, in.grid_lo);
      EXPECT_LE(t.cut, in.grid_hi);
      ASSERT_EQ(t.grid.size(), in.n_sample);
      EXPECT_EQ(t.grid.front(), in.grid_lo);
      EXPECT_EQ(t.grid.back(), in.grid_hi);
      EXPECT_TRUE(std::find(t.grid.begin(), t.grid.end(), t.cut) != t.grid.end());
    }
  }
}

TEST(Select, AgreesWithOracleOnRandomFixtures) {
  gen::Gen g(5);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto v = random_values(g, 20 + g.below(3000));
    const Side side = g.chance(0.5) ? Side::Low : Side::High;
    const double frac = g.chance(0.5) ? 0.05 : g.uniform(0.01, 0.3);
    Threshold t;
    try {
      t = select_threshold(v, side, frac, trial);
    } catch (const DegenerateError&) {
      continue;
    }
    const auto o = oracle::select_threshold(v, side, frac, trial);
    ASSERT_EQ(o.grid.size(), t.grid.size());
    for (std::size_t i = 0; i < o.grid.size(); ++i) EXPECT_NEAR(o.grid[i], t.grid[i], 1e-12);
    EXPECT_EQ(o.cut, t.cut) << "trial " << trial;
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(Select, BimodalCutBetweenModes) {
  gen::Gen g(6);
  const auto v = gen::bimodal(g, 10000, 500);
  const auto t = select_threshold(v, Side::Low, 0.05, 1);
  EXPECT_EQ(t.n_sample, 500u);
  EXPECT_GT(t.cut, 1.0);
  EXPECT_LT(t.cut, 8.0);
  EXPECT_EQ(oracle::select_threshold(v, Side::Low, 0.05, 1).cut, t.cut);
  const auto removed = std::count_if(v.begin(), v.end(), [&](double x) { return x < t.cut; });
  EXPECT_EQ(removed, 500);
}

TEST(Select, HighSideMirrorsLowSide) {
  gen::Gen g(7);
  auto v = gen::bimodal(g, 4000, 200);
  std::vector<double> neg(v.size());
  std::transform(v.begin(), v.end(), neg.begin(), [](double x) { return -x; });
  const auto lo = select_threshold(v, Side::Low, 0.05, 9);
  const auto hi = select_threshold(neg, Side::High, 0.05, 9);
  EXPECT_EQ(hi.cut, -lo.cut);
  EXPECT_EQ(std::count_if(neg.begin(), neg.end(), [&](double x) { return !passes(x, hi); }), 200);
}

TEST(Select, DeterministicForSeed) {
  gen::Gen g(8);
  const auto v = random_values(g, 1500);
  const auto a = select_threshold(v, Side::Low, 0.05, 42);
  const auto b = select_threshold(v, Side::Low, 0.05, 42);
  EXPECT_EQ(a.cut, b.cut);
  EXPECT_EQ(a.grid, b.grid);
  EXPECT_EQ(a.value_density, b.value_density);
  EXPECT_EQ(a.sample_density, b.sample_density);
  EXPECT_EQ(format_thresholds_json(std::vector<Threshold>{a}),
            format_thresholds_json(std::vector<Threshold>{b}));
}

TEST(Select, InputOrderDoesNotMatter) {
  gen::Gen g(9);
  auto v = random_values(g, 900);
  const auto a = select_threshold(v, Side::High, 0.05, 3);
  g.shuffle(v);
  EXPECT_EQ(select_threshold(v, Side::High, 0.05, 3).cut, a.cut);
}

TEST(Prune, NoThresholdsKeepsAll) {
  const auto docs = docs_for(3);
  const auto r = prune(docs, relative_table({0.1, 0.2, 0.3}), {});
  EXPECT_EQ(r.kept, docs);
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.delta.docs_before, 3u);
  EXPECT_EQ(r.delta.docs_after, 3u);
}

TEST(Prune, StrictlyBelowLowCut) {
  const auto docs = docs_for(3);
  const std::vector<Threshold> t = {low_cut(0.5)};
  const auto r = prune(docs, relative_table({0.2, 0.5, 0.9}), t);
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "1");
  EXPECT_EQ(r.kept[1].id, "2");
  EXPECT_EQ(r.removed[0].id, "0");
  EXPECT_EQ(r.delta.stage_name, "heuristic-prune");
  EXPECT_EQ(r.delta.docs_after, 2u);
}

TEST(Prune, StrictlyAboveHighCut) {
  auto t = low_cut(0.5);
  t.side = Side::High;
  const auto r = prune(docs_for(3), relative_table({0.2, 0.5, 0.9}), std::vector<Threshold>{t});
  EXPECT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.removed[0].id, "2");
}

TEST(Prune, MissingRowNamesDoc) {
  auto docs = docs_for(2);
  docs.push_back({"ghost", "", "x", "yo"});
  try {
    prune(docs, relative_table({1, 2}), std::vector<Threshold>{low_cut(0)});
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Prune, PlantedNinetyTen) {
  gen::Gen g(10);
  std::vector<double> scores;
  for (int i = 0; i < 100; ++i) scores.push_back(i < 10 ? g.normal(0.1, 0.02) : g.normal(1.8, 0.05));
  const auto t = select_threshold(scores, Side::Low, 0.1, 1, "relative");
  EXPECT_EQ(t.cut, oracle::select_threshold(scores, Side::Low, 0.1, 1).cut);
  const auto r = prune(docs_for(100), relative_table(scores), std::vector<Threshold>{t});
  ASSERT_EQ(r.removed.size(), 10u);
  for (const auto& d : r.removed) EXPECT_LT(std::stoi(d.id), 10);
}

TEST(Prune, RaisingLowCutNeverKeepsMore) {
  gen::Gen g(11);
  std::vector<double> scores(300);
  for (auto& s : scores) s = std::round(g.uniform(0, 20)) / 10;
  const auto table = relative_table(scores);
  const auto docs = docs_for(scores.size());
  std::size_t prev = docs.size() + 1;
  for (double cut = -0.5; cut <= 2.5; cut += 0.05) {
    const auto kept = prune(docs, table, std::vector<Threshold>{low_cut(cut)}).kept.size();
    EXPECT_LE(kept, prev);
    prev = kept;
  }
}

TEST(Thresholds, JsonFields) {
  const auto t = select_threshold(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, Side::Low, 0.5, 1, "entropy");
  const auto text = format_thresholds_json(std::vector<Threshold>{t});
  for (const char* key : {"\"target\": \"entropy\"", "\"side\": \"low\"", "\"cut\"", "\"n_sample\": 5",
                          "\"seed\": 1", "\"grid\"", "\"value_density\"", "\"sample_density\""}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}
