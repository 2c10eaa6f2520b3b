#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wikiclean/document.hpp"

namespace wikiclean::analysis {

/// One wiki in retention space.
struct RetentionPoint {
  std::string wiki;
  double frac_docs_retained = 1;
  double frac_chars_retained = 1;
  double weight = 1;  ///< unfiltered article count
};

struct TierOptions {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  bool weighted = true;
};

struct TierAssignment {
  std::vector<int> tiers;  ///< aligned with the input points, 1 = best
  /// Centroids in original (unstandardized) units, index 0 = tier 1.
  std::vector<std::array<double, 2>> centroids;
  double inertia = 0;
};

/// k-means over z-scored (frac_docs, frac_chars). Tiers are numbered by
/// descending centroid retention sum. The result does not depend on input
/// order. Throws DataError with fewer than k distinct points.
TierAssignment tier_cluster(std::span<const RetentionPoint> points,
                            const TierOptions& options = {});

struct WikiEditStats {
  std::uint64_t editors = 0;
  std::uint64_t edits = 0;
  std::uint64_t total_pages = 0;
  std::uint64_t articles = 0;
  std::uint64_t non_articles = 0;
};

/// Editors * (Edits / Total) * (Articles / Non-Articles). Throws DataError
/// ("undefined Depth+") when total_pages or non_articles is zero.
double depth_plus(const WikiEditStats& stats);

/// 1-based ranks, ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct Correlation {
  double rho = 0;
  double p_value = 1;
  std::size_t n = 0;
};

/// Spearman's rho with average ranks and a two-sided p-value from Student's t
/// with n - 2 degrees of freedom. Throws DataError on size mismatch, n < 3 or
/// a constant input.
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// Stages that make up primary filtering, in execution order.
inline constexpr std::array<const char*, 3> kPrimaryStages = {
    "script", "exact-dedup", "minhash-dedup"};

/// Fractions retained after the composed primary stages, weighted by the
/// unfiltered article count.
std::vector<RetentionPoint> retention_table(
    const std::map<std::string, std::vector<StageDelta>>& manifests);

}  // namespace wikiclean::analysis
