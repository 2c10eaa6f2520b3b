#include "wikiclean/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "wikiclean/error.hpp"
#include "wikiclean/sampling.hpp"

namespace wikiclean::threshold {
namespace {

// Beyond this many bandwidths a Gaussian term is exactly 0 (pdf) or exactly
// 0/1 (cdf) in double precision, so skipping it leaves every sum bit-identical.
constexpr double kCutoff = 40.0;

double kernel_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double kernel_pdf_unscaled(double z) { return std::exp(-0.5 * z * z); }

double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::vector<double> negate_reverse(std::span<const double> v) {
  std::vector<double> out(v.rbegin(), v.rend());
  for (double& x : out) x = -x;
  return out;
}

ThresholdInputs low_side_inputs(std::vector<double> sorted, double frac, std::uint64_t seed) {
  ThresholdInputs in;
  in.side = Side::Low;
  in.n_docs = sorted.size();
  in.n_sample = sample_size(in.n_docs, frac);
  in.value_sample.assign(sorted.begin(),
                         sorted.begin() + static_cast<std::ptrdiff_t>(in.n_sample));

  in.background_sample.reserve(in.n_sample);
  for (std::size_t i : sample_indices(in.n_docs, in.n_sample, seed)) {
    in.background_sample.push_back(sorted[i]);
  }
  std::sort(in.background_sample.begin(), in.background_sample.end());

  in.bandwidth = silverman_bandwidth(sorted, in.n_sample);
  in.grid_lo = in.value_sample.front();
  in.grid_hi = in.background_sample.back();
  in.values = std::move(sorted);
  return in;
}

}  // namespace

std::string_view side_name(Side side) { return side == Side::Low ? "low" : "high"; }

Side parse_side(std::string_view name) {
  if (name == "low") return Side::Low;
  if (name == "high") return Side::High;
  throw UsageError("unknown side: " + std::string(name));
}

std::vector<double> kde(std::span<const double> sample, std::span<const double> points,
                        double bandwidth) {
  if (sample.empty()) throw UsageError("kde needs a nonempty sample");
  if (!(bandwidth > 0)) throw UsageError("kde bandwidth must be positive");
  const bool sorted = std::is_sorted(sample.begin(), sample.end());
  const double scale =
      1.0 / (static_cast<double>(sample.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(points.size());
  for (std::size_t g = 0; g < points.size(); ++g) {
    const double x = points[g];
    auto first = sample.begin();
    auto last = sample.end();
    if (sorted) {
      first = std::lower_bound(sample.begin(), sample.end(), x - kCutoff * bandwidth);
      last = std::upper_bound(first, sample.end(), x + kCutoff * bandwidth);
    }
    double acc = 0.0;
    for (auto it = first; it != last; ++it) acc += kernel_pdf_unscaled((x - *it) / bandwidth);
    out[g] = acc * scale;
  }
  return out;
}

std::vector<double> kde_mass_below(std::span<const double> sample,
                                   std::span<const double> points, double bandwidth) {
  if (sample.empty()) throw UsageError("kde needs a nonempty sample");
  if (!(bandwidth > 0)) throw UsageError("kde bandwidth must be positive");
  const double m = static_cast<double>(sample.size());
  std::vector<double> out(points.size());
  for (std::size_t g = 0; g < points.size(); ++g) {
    const double x = points[g];
    // Terms left of the window are exactly 1, right of it exactly 0.
    const auto first = std::lower_bound(sample.begin(), sample.end(), x - kCutoff * bandwidth);
    const auto last = std::upper_bound(first, sample.end(), x + kCutoff * bandwidth);
    double acc = static_cast<double>(first - sample.begin());
    for (auto it = first; it != last; ++it) acc += kernel_cdf((x - *it) / bandwidth);
    out[g] = acc / m;
  }
  return out;
}

double silverman_bandwidth(std::span<const double> values, std::size_t m) {
  if (values.empty() || m == 0) throw UsageError("bandwidth needs a nonempty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  if (range == 0) return 0.0;
  const double n = static_cast<double>(sorted.size());
  double mean = 0;
  for (double v : sorted) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = sorted.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
  return std::max(h, 1e-6 * range);
}

std::size_t sample_size(std::size_t n_docs, double frac) {
  if (!(frac > 0 && frac <= 1)) throw UsageError("sample fraction must be in (0, 1]");
  // The epsilon keeps products like 0.05 * 60 from flooring to 2.
  const auto n = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n_docs) + 1e-9));
  return n < 1 ? n_docs : n;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  if (count == 0) return grid;
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ThresholdInputs threshold_inputs(std::span<const double> values, Side side, double frac,
                                 std::uint64_t seed) {
  std::vector<double> sorted(values.begin(), values.end());
  if (std::any_of(sorted.begin(), sorted.end(), [](double v) { return !std::isfinite(v); })) {
    throw DataError("score distribution contains non-finite values");
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < 2 || sorted.front() == sorted.back()) {
    throw DegenerateError("degenerate distribution; no threshold");
  }
  if (side == Side::Low) return low_side_inputs(std::move(sorted), frac, seed);

  // The high side is the low side of the mirrored distribution.
  auto mirrored = low_side_inputs(negate_reverse(sorted), frac, seed);
  ThresholdInputs in;
  in.side = Side::High;
  in.values = std::move(sorted);
  in.n_docs = mirrored.n_docs;
  in.n_sample = mirrored.n_sample;
  in.value_sample = negate_reverse(mirrored.value_sample);
  in.background_sample = negate_reverse(mirrored.background_sample);
  in.bandwidth = mirrored.bandwidth;
  in.grid_lo = -mirrored.grid_hi;
  in.grid_hi = -mirrored.grid_lo;
  return in;
}

Threshold select_threshold(std::span<const double> values, Side side, double frac,
                           std::uint64_t seed, std::string target) {
  const auto in = threshold_inputs(values, side, frac, seed);
  Threshold t;
  t.target = std::move(target);
  t.side = side;
  t.frac = frac;
  t.n_docs = in.n_docs;
  t.n_sample = in.n_sample;
  t.seed = seed;
  t.bandwidth = in.bandwidth;

  // Work in low-side orientation; for the high side that is the mirror image.
  const bool mirror = side == Side::High;
  const auto head = mirror ? negate_reverse(in.value_sample) : in.value_sample;
  const auto background = mirror ? negate_reverse(in.background_sample) : in.background_sample;
  const double lo = mirror ? -in.grid_hi : in.grid_lo;
  const double hi = mirror ? -in.grid_lo : in.grid_hi;
  const auto grid = linspace(lo, hi, in.n_sample);

  const auto head_mass = kde_mass_below(head, grid, in.bandwidth);
  const auto background_mass = kde_mass_below(background, grid, in.bandwidth);
  std::vector<double> objective(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    objective[i] = head_mass[i] - background_mass[i];
    if (objective[i] > objective[best]) best = i;
  }
  auto head_density = kde(head, grid, in.bandwidth);
  auto background_density = kde(background, grid, in.bandwidth);

  if (mirror) {
    t.cut = -grid[best];
    t.grid = negate_reverse(grid);
    t.objective.assign(objective.rbegin(), objective.rend());
    t.value_density.assign(head_density.rbegin(), head_density.rend());
    t.sample_density.assign(background_density.rbegin(), background_density.rend());
  } else {
    t.cut = grid[best];
    t.grid = grid;
    t.objective = std::move(objective);
    t.value_density = std::move(head_density);
    t.sample_density = std::move(background_density);
  }
  return t;
}

bool passes(double value, const Threshold& threshold) {
  return threshold.side == Side::Low ? !(value < threshold.cut) : !(value > threshold.cut);
}

PruneResult prune(std::span<const Document> docs, const heuristics::ScoreTable& scores,
                  std::span<const Threshold> thresholds, std::string stage_name) {
  std::vector<heuristics::ScoreTarget> targets;
  targets.reserve(thresholds.size());
  for (const auto& t : thresholds) targets.push_back(heuristics::parse_target(t.target));

  PruneResult result;
  for (const auto& doc : docs) {
    const auto* row = scores.find(doc.id);
    if (!row) throw DataError("no score row for doc_id " + doc.id);
    bool keep = true;
    for (std::size_t i = 0; i < thresholds.size() && keep; ++i) {
      keep = passes(heuristics::ScoreTable::value(*row, targets[i]), thresholds[i]);
    }
    (keep ? result.kept : result.removed).push_back(doc);
  }
  result.delta = make_delta(std::move(stage_name), corpus_stats(docs), corpus_stats(result.kept));
  return result;
}

std::string format_thresholds_json(std::span<const Threshold> thresholds) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& t : thresholds) {
    nlohmann::ordered_json j;
    j["target"] = t.target;
    j["side"] = side_name(t.side);
    j["cut"] = t.cut;
    j["frac"] = t.frac;
    j["n_docs"] = t.n_docs;
    j["n_sample"] = t.n_sample;
    j["seed"] = t.seed;
    j["bandwidth"] = t.bandwidth;
    j["grid"] = t.grid;
    j["value_density"] = t.value_density;
    j["sample_density"] = t.sample_density;
    j["objective"] = t.objective;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace wikiclean::threshold
