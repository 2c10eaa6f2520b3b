#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wikiclean::analysis {

/// Row-major point matrix.
struct PointSet {
  std::size_t dims = 0;
  std::vector<double> coords;

  std::size_t size() const { return dims == 0 ? 0 : coords.size() / dims; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dims, dims};
  }
};

struct KMeansOptions {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
};

struct KMeansResult {
  std::vector<std::size_t> labels;
  PointSet centroids;
  double inertia = 0;  ///< weighted sum of squared distances
  std::size_t iterations = 0;
};

/// Weighted Lloyd iterations from weighted k-means++ seeds; the run with the
/// lowest inertia across restarts wins (earliest restart on ties). Restart r
/// draws from mt19937_64 seeded with seed + r.
KMeansResult weighted_kmeans(const PointSet& points,
                             std::span<const double> weights,
                             const KMeansOptions& options);

}  // namespace wikiclean::analysis
