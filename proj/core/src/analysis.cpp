#include "wikiclean/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "wikiclean/error.hpp"
#include "wikiclean/kmeans.hpp"

namespace wikiclean::analysis {

TierAssignment tier_cluster(std::span<const RetentionPoint> points, const TierOptions& options) {
  const std::size_t n = points.size();
  if (n < options.k) {
    throw DataError("tier clustering needs at least " + std::to_string(options.k) +
                    " wikis, got " + std::to_string(n));
  }

  // Canonical order so the outcome does not depend on input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    return std::tie(pa.wiki, pa.frac_docs_retained, pa.frac_chars_retained, pa.weight) <
           std::tie(pb.wiki, pb.frac_docs_retained, pb.frac_chars_retained, pb.weight);
  });

  std::array<double, 2> mean{};
  std::array<double, 2> sd{};
  for (const auto& p : points) {
    mean[0] += p.frac_docs_retained;
    mean[1] += p.frac_chars_retained;
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (const auto& p : points) {
    sd[0] += (p.frac_docs_retained - mean[0]) * (p.frac_docs_retained - mean[0]);
    sd[1] += (p.frac_chars_retained - mean[1]) * (p.frac_chars_retained - mean[1]);
  }
  for (double& s : sd) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0)) s = 1.0;
  }

  PointSet standardized{2, {}};
  standardized.coords.reserve(2 * n);
  std::vector<double> weights;
  weights.reserve(n);
  for (std::size_t i : order) {
    const auto& p = points[i];
    if (!(p.weight > 0)) throw DataError("non-positive weight for wiki " + p.wiki);
    standardized.coords.push_back((p.frac_docs_retained - mean[0]) / sd[0]);
    standardized.coords.push_back((p.frac_chars_retained - mean[1]) / sd[1]);
    weights.push_back(options.weighted ? p.weight : 1.0);
  }

  KMeansOptions km;
  km.k = options.k;
  km.seed = options.seed;
  km.restarts = options.restarts;
  const auto result = weighted_kmeans(standardized, weights, km);

  // Centroids in original units as weighted means of the members.
  std::vector<std::array<double, 2>> centroids(options.k, {0.0, 0.0});
  std::vector<double> mass(options.k, 0.0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto& p = points[order[pos]];
    const auto c = result.labels[pos];
    mass[c] += weights[pos];
    centroids[c][0] += weights[pos] * p.frac_docs_retained;
    centroids[c][1] += weights[pos] * p.frac_chars_retained;
  }
  for (std::size_t c = 0; c < options.k; ++c) {
    if (mass[c] > 0) {
      centroids[c][0] /= mass[c];
      centroids[c][1] /= mass[c];
    }
  }

  std::vector<std::size_t> by_retention(options.k);
  std::iota(by_retention.begin(), by_retention.end(), std::size_t{0});
  std::stable_sort(by_retention.begin(), by_retention.end(), [&](std::size_t a, std::size_t b) {
    return centroids[a][0] + centroids[a][1] > centroids[b][0] + centroids[b][1];
  });
  std::vector<int> tier_of_cluster(options.k);
  for (std::size_t rank = 0; rank < options.k; ++rank) {
    tier_of_cluster[by_retention[rank]] = static_cast<int>(rank) + 1;
  }

  TierAssignment out;
  out.inertia = result.inertia;
  out.tiers.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    out.tiers[order[pos]] = tier_of_cluster[result.labels[pos]];
  }
  out.centroids.resize(options.k);
  for (std::size_t rank = 0; rank < options.k; ++rank) {
    out.centroids[rank] = centroids[by_retention[rank]];
  }
  return out;
}

double depth_plus(const WikiEditStats& s) {
  if (s.total_pages == 0 || s.non_articles == 0) {
    throw DataError("undefined Depth+ (total pages and non-articles must be positive)");
  }
  return static_cast<double>(s.editors) *
         (static_cast<double>(s.edits) / static_cast<double>(s.total_pages)) *
         (static_cast<double>(s.articles) / static_cast<double>(s.non_articles));
}

std::vector<double> average_ranks(std::span<const double> values) {
  if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    throw DataError("cannot rank NaN values");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DataError("spearman: need at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  // Ranks are 1..n, so their mean is exact.
  const double mean = 0.5 * (static_cast<double>(n) + 1.0);
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw DataError("spearman: rho undefined for constant input");
  Correlation c;
  c.n = n;
  c.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(c.rho) >= 1.0) {
    c.p_value = 0.0;
  } else {
    const double dof = static_cast<double>(n - 2);
    const double t = c.rho * std::sqrt(dof / ((1.0 - c.rho) * (1.0 + c.rho)));
    const boost::math::students_t_distribution<double> dist(dof);
    c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return c;
}

std::vector<RetentionPoint> retention_table(
    const std::map<std::string, std::vector<StageDelta>>& manifests) {
  std::vector<RetentionPoint> points;
  for (const auto& [wiki, stages] : manifests) {
    std::array<const StageDelta*, kPrimaryStages.size()> found{};
    for (std::size_t s = 0; s < kPrimaryStages.size(); ++s) {
      for (const auto& d : stages) {
        if (d.stage_name == kPrimaryStages[s]) found[s] = &d;
      }
      if (!found[s]) {
        throw DataError("manifest for " + wiki + " is missing stage " + kPrimaryStages[s]);
      }
    }
    const auto& first = *found.front();
    const auto& last = *found.back();
    if (first.docs_before == 0) throw DataError("manifest for " + wiki + " has no articles");
    RetentionPoint p;
    p.wiki = wiki;
    p.frac_docs_retained =
        static_cast<double>(last.docs_after) / static_cast<double>(first.docs_before);
    p.frac_chars_retained =
        first.chars_before == 0
            ? 1.0
            : static_cast<double>(last.chars_after) / static_cast<double>(first.chars_before);
    p.weight = static_cast<double>(first.docs_before);
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace wikiclean::analysis
