#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/document.hpp"
#include "wikiclean/score_table.hpp"

namespace wikiclean::threshold {

/// Low: prune the head of the distribution (values strictly below the cut).
/// High: prune the tail (values strictly above the cut).
enum class Side { Low, High };
std::string_view side_name(Side side);
Side parse_side(std::string_view name);

/// Gaussian kernel density estimate (1/(m h)) * sum phi((x - x_i) / h) at
/// each point. Requires a nonempty sample and h > 0.
std::vector<double> kde(std::span<const double> sample,
                        std::span<const double> points, double bandwidth);

/// Smoothed mass at or below each point: (1/m) * sum Phi((x - x_i) / h).
/// `sample` must be sorted ascending.
std::vector<double> kde_mass_below(std::span<const double> sample,
                                   std::span<const double> points,
                                   double bandwidth);

/// Silverman's rule 0.9 * min(sd, IQR / 1.34) * m^(-1/5) over `values`, for a
/// sample of size m. Falls back to sd when the IQR is zero, and never returns
/// less than 1e-6 * (max - min). Returns 0 only for constant input.
double silverman_bandwidth(std::span<const double> values, std::size_t m);

/// floor(frac * n_docs), or n_docs when that is below one.
std::size_t sample_size(std::size_t n_docs, double frac);

/// `count` evenly spaced points over [lo, hi]; the endpoints are exact.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Everything the selection step consumes, exposed for audits and oracles.
struct ThresholdInputs {
  Side side = Side::Low;
  std::vector<double> values;             ///< full distribution, ascending
  std::size_t n_docs = 0;
  std::size_t n_sample = 0;
  std::vector<double> value_sample;       ///< head (Low) or tail (High), ascending
  std::vector<double> background_sample;  ///< uniform draw without replacement, ascending
  double bandwidth = 0;                   ///< shared by both estimates
  double grid_lo = 0;
  double grid_hi = 0;
};

/// Throws DegenerateError when `values` has fewer than two distinct entries.
ThresholdInputs threshold_inputs(std::span<const double> values, Side side,
                                 double frac, std::uint64_t seed);

struct Threshold {
  std::string target;
  Side side = Side::Low;
  double cut = 0;
  double frac = 0.05;
  std::size_t n_docs = 0;
  std::size_t n_sample = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0;
  std::vector<double> grid;
  std::vector<double> value_density;
  std::vector<double> sample_density;
  /// Smoothed mass of the value sample beyond each grid point minus that of
  /// the background sample; the cut is its argmax.
  std::vector<double> objective;
};

/// Picks the grid point where the outlier sample's estimated mass most
/// exceeds the background's. Ties go to the point that prunes less.
Threshold select_threshold(std::span<const double> values, Side side,
                           double frac = 0.05, std::uint64_t seed = 0,
                           std::string target = {});

/// True when `value` survives the threshold.
bool passes(double value, const Threshold& threshold);

struct PruneResult {
  std::vector<Document> kept;
  std::vector<Document> removed;
  StageDelta delta;
};

/// Removes a document when any threshold rejects its score. Every document
/// must have a row in `scores` (DataError naming the id otherwise).
PruneResult prune(std::span<const Document> docs,
                  const heuristics::ScoreTable& scores,
                  std::span<const Threshold> thresholds,
                  std::string stage_name = "heuristic-prune");

/// JSON array, one object per threshold with cut, side, n_sample, seed, grid
/// and both density curves.
std::string format_thresholds_json(std::span<const Threshold> thresholds);

}  // namespace wikiclean::threshold
