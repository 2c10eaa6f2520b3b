#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikiclean/document.hpp"

namespace wikiclean::heuristics {

enum class Metric {
  Length,
  UniqueTrigrams,
  UniqueWords,
  FracUniqueTrigrams,
  FracUniqueWords,
  TrigramEntropy,
  UnigramEntropy,
};
inline constexpr std::size_t kMetricCount = 7;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::Length,          Metric::UniqueTrigrams,     Metric::UniqueWords,
    Metric::FracUniqueTrigrams, Metric::FracUniqueWords, Metric::TrigramEntropy,
    Metric::UnigramEntropy,
};

enum class Family { Absolute, Relative, Entropy };
inline constexpr std::size_t kFamilyCount = 3;
inline constexpr std::array<Family, kFamilyCount> kAllFamilies = {
    Family::Absolute, Family::Relative, Family::Entropy};

std::string_view metric_name(Metric m);
std::string_view family_name(Family f);
std::optional<Metric> parse_metric(std::string_view name);
std::optional<Family> parse_family(std::string_view name);
Family family_of(Metric m);
std::span<const Metric> metrics_in(Family f);

/// Whitespace tokenization without case folding.
std::vector<std::string_view> tokenize_words(std::string_view text);

struct NgramStats {
  std::size_t total = 0;  ///< N, number of n-gram windows
  std::unordered_map<std::string, std::size_t> counts;
};

NgramStats ngram_stats(std::span<const std::string_view> tokens, std::size_t n);
/// n-grams over code points rather than words.
NgramStats char_ngram_stats(std::u32string_view chars, std::size_t n);

/// Shannon entropy in bits of the empirical n-gram distribution; 0 if N = 0.
double entropy(const NgramStats& stats);

enum class TrigramUnit { Word, Character };
std::string_view trigram_unit_name(TrigramUnit unit);
TrigramUnit parse_trigram_unit(std::string_view name);

struct MetricOptions {
  TrigramUnit trigram_unit = TrigramUnit::Word;
};

struct MetricVector {
  double length = 0;
  double unique_trigrams = 0;
  double unique_words = 0;
  double frac_unique_trigrams = 0;
  double frac_unique_words = 0;
  double trigram_entropy = 0;
  double unigram_entropy = 0;

  double value(Metric m) const;
  double& value(Metric m);

  friend bool operator==(const MetricVector&, const MetricVector&) = default;
};

MetricVector compute_metrics(std::string_view text,
                             const MetricOptions& options = {});
inline MetricVector compute_metrics(const Document& doc,
                                    const MetricOptions& options = {}) {
  return compute_metrics(doc.text, options);
}

struct MetricBounds {
  double min = 0;
  double max = 0;
};

/// Per-metric normalization bounds. Unset entries use the observed corpus
/// minimum and maximum.
struct NormalizationOptions {
  std::array<std::optional<MetricBounds>, kMetricCount> bounds{};
};

struct FamilyScores {
  std::array<double, kFamilyCount> scores{};

  double get(Family f) const { return scores[static_cast<std::size_t>(f)]; }
  double& get(Family f) { return scores[static_cast<std::size_t>(f)]; }
};

/// Min-max normalizes every metric column and sums the normalized values
/// within each family, so a family of K metrics scores in [0, K]. A constant
/// column contributes 0. Throws UsageError on an empty table.
std::vector<FamilyScores> family_scores(std::span<const MetricVector> table,
                                        const NormalizationOptions& options = {});

}  // namespace wikiclean::heuristics
