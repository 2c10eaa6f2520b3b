#include "wikiclean/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "wikiclean/error.hpp"

namespace wikiclean::analysis {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Index drawn with probability proportional to `mass`; `total` is its sum.
std::size_t draw(std::mt19937_64& engine, std::span<const double> mass, double total) {
  const double target = unit_uniform(engine) * total;
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0) continue;
    acc += mass[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

PointSet plus_plus_seeds(const PointSet& points, std::span<const double> weights,
                         std::size_t k, std::mt19937_64& engine) {
  const std::size_t n = points.size();
  PointSet centers{points.dims, {}};
  centers.coords.reserve(k * points.dims);
  auto add_center = [&](std::size_t i) {
    const auto p = points.point(i);
    centers.coords.insert(centers.coords.end(), p.begin(), p.end());
  };

  double total_weight = 0;
  for (double w : weights) total_weight += w;
  add_center(draw(engine, weights, total_weight));

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<double> mass(n);
  while (centers.size() < k) {
    const auto latest = centers.point(centers.size() - 1);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points.point(i), latest));
      mass[i] = weights[i] * nearest[i];
      total += mass[i];
    }
    if (!(total > 0)) break;
    add_center(draw(engine, mass, total));
  }
  return centers;
}

struct Run {
  std::vector<std::size_t> labels;
  PointSet centroids;
  double inertia = 0;
  std::size_t iterations = 0;
};

Run lloyd(const PointSet& points, std::span<const double> weights, PointSet centroids,
          std::size_t max_iterations) {
  const std::size_t n = points.size();
  const std::size_t k = centroids.size();
  const std::size_t dims = points.dims;
  Run run;
  run.labels.assign(n, k);
  for (run.iterations = 0; run.iterations < max_iterations; ++run.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points.point(i), centroids.point(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }
    if (!changed && run.iterations > 0) break;

    std::vector<double> sums(k * dims, 0.0);
    std::vector<double> mass(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = run.labels[i];
      mass[c] += weights[i];
      const auto p = points.point(i);
      for (std::size_t d = 0; d < dims; ++d) sums[c * dims + d] += weights[i] * p[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] > 0) {
        for (std::size_t d = 0; d < dims; ++d) centroids.coords[c * dims + d] = sums[c * dims + d] / mass[c];
        continue;
      }
      // Empty cluster: move it onto the point contributing most inertia.
      std::size_t far = 0;
      double far_cost = -1;
      for (std::size_t i = 0; i < n; ++i) {
        const double cost =
            weights[i] * squared_distance(points.point(i), centroids.point(run.labels[i]));
        if (cost > far_cost) {
          far_cost = cost;
          far = i;
        }
      }
      const auto p = points.point(far);
      std::copy(p.begin(), p.end(), centroids.coords.begin() + static_cast<std::ptrdiff_t>(c * dims));
      run.labels[far] = c;
    }
  }
  run.inertia = 0;
  for (std::size_t i = 0; i < n; ++i) {
    run.inertia += weights[i] * squared_distance(points.point(i), centroids.point(run.labels[i]));
  }
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult weighted_kmeans(const PointSet& points, std::span<const double> weights,
                             const KMeansOptions& options) {
  const std::size_t n = points.size();
  if (points.dims == 0) throw UsageError("k-means needs at least one dimension");
  if (options.k == 0) throw UsageError("k must be at least 1");
  if (weights.size() != n) throw UsageError("one weight per point required");
  if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w > 0); })) {
    throw DataError("k-means weights must be positive");
  }
  std::set<std::vector<double>> distinct;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = points.point(i);
    distinct.emplace(p.begin(), p.end());
  }
  if (distinct.size() < options.k) {
    throw DataError("k-means needs at least " + std::to_string(options.k) +
                    " distinct points, got " + std::to_string(distinct.size()));
  }

  KMeansResult best;
  bool have_best = false;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 engine(options.seed + r);
    auto seeds = plus_plus_seeds(points, weights, options.k, engine);
    auto run = lloyd(points, weights, std::move(seeds), options.max_iterations);
    if (!have_best || run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
      best.iterations = run.iterations;
      have_best = true;
    }
  }
  return best;
}

}  // namespace wikiclean::analysis
