#include "wikiclean/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wikiclean/error.hpp"
#include "wikiclean/text.hpp"

namespace wikiclean::heuristics {
namespace {

constexpr std::array<Metric, 3> kAbsolute = {Metric::Length, Metric::UniqueTrigrams,
                                             Metric::UniqueWords};
constexpr std::array<Metric, 2> kRelative = {Metric::FracUniqueTrigrams,
                                             Metric::FracUniqueWords};
constexpr std::array<Metric, 2> kEntropy = {Metric::TrigramEntropy, Metric::UnigramEntropy};

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Length: return "length";
    case Metric::UniqueTrigrams: return "unique_trigrams";
    case Metric::UniqueWords: return "unique_words";
    case Metric::FracUniqueTrigrams: return "frac_unique_trigrams";
    case Metric::FracUniqueWords: return "frac_unique_words";
    case Metric::TrigramEntropy: return "trigram_entropy";
    case Metric::UnigramEntropy: return "unigram_entropy";
  }
  return "length";
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Absolute: return "absolute";
    case Family::Relative: return "relative";
    case Family::Entropy: return "entropy";
  }
  return "absolute";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

Family family_of(Metric m) {
  switch (m) {
    case Metric::Length:
    case Metric::UniqueTrigrams:
    case Metric::UniqueWords: return Family::Absolute;
    case Metric::FracUniqueTrigrams:
    case Metric::FracUniqueWords: return Family::Relative;
    case Metric::TrigramEntropy:
    case Metric::UnigramEntropy: return Family::Entropy;
  }
  return Family::Absolute;
}

std::span<const Metric> metrics_in(Family f) {
  switch (f) {
    case Family::Absolute: return kAbsolute;
    case Family::Relative: return kRelative;
    case Family::Entropy: return kEntropy;
  }
  return {};
}

std::vector<std::string_view> tokenize_words(std::string_view text) {
  return text::split_whitespace(text);
}

NgramStats ngram_stats(std::span<const std::string_view> tokens, std::size_t n) {
  if (n == 0) throw UsageError("n-gram order must be at least 1");
  NgramStats stats;
  if (tokens.size() < n) return stats;
  stats.total = tokens.size() - n + 1;
  std::string key;
  for (std::size_t i = 0; i < stats.total; ++i) {
    key.clear();
    for (std::size_t j = 0; j < n; ++j) {
      // Tokens never contain whitespace, so a space separator is unambiguous.
      if (j) key += ' ';
      key += tokens[i + j];
    }
    ++stats.counts[key];
  }
  return stats;
}

NgramStats char_ngram_stats(std::u32string_view chars, std::size_t n) {
  if (n == 0) throw UsageError("n-gram order must be at least 1");
  NgramStats stats;
  if (chars.size() < n) return stats;
  stats.total = chars.size() - n + 1;
  for (std::size_t i = 0; i < stats.total; ++i) {
    ++stats.counts[text::encode(chars.substr(i, n))];
  }
  return stats;
}

double entropy(const NgramStats& stats) {
  if (stats.total == 0) return 0.0;
  // Accumulate in ascending count order so the sum is independent of hash
  // table layout.
  std::vector<std::size_t> counts;
  counts.reserve(stats.counts.size());
  for (const auto& [gram, count] : stats.counts) counts.push_back(count);
  std::sort(counts.begin(), counts.end());
  const double total = static_cast<double>(stats.total);
  double h = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  // -0.0 and tiny negative rounding for single-symbol distributions.
  return h > 0.0 ? h : 0.0;
}

std::string_view trigram_unit_name(TrigramUnit unit) {
  return unit == TrigramUnit::Word ? "word" : "char";
}

TrigramUnit parse_trigram_unit(std::string_view name) {
  if (name == "word") return TrigramUnit::Word;
  if (name == "char" || name == "character") return TrigramUnit::Character;
  throw UsageError("unknown trigram unit: " + std::string(name));
}

double MetricVector::value(Metric m) const {
  return const_cast<MetricVector*>(this)->value(m);
}

double& MetricVector::value(Metric m) {
  switch (m) {
    case Metric::Length: return length;
    case Metric::UniqueTrigrams: return unique_trigrams;
    case Metric::UniqueWords: return unique_words;
    case Metric::FracUniqueTrigrams: return frac_unique_trigrams;
    case Metric::FracUniqueWords: return frac_unique_words;
    case Metric::TrigramEntropy: return trigram_entropy;
    case Metric::UnigramEntropy: return unigram_entropy;
  }
  return length;
}

MetricVector compute_metrics(std::string_view text, const MetricOptions& options) {
  MetricVector m;
  const auto chars = text::decode(text);
  m.length = static_cast<double>(chars.size());

  const auto words = tokenize_words(text);
  const auto unigrams = ngram_stats(words, 1);
  const auto trigrams = options.trigram_unit == TrigramUnit::Word
                            ? ngram_stats(words, 3)
                            : char_ngram_stats(chars, 3);

  m.unique_words = static_cast<double>(unigrams.counts.size());
  m.unique_trigrams = static_cast<double>(trigrams.counts.size());
  m.frac_unique_words = ratio(unigrams.counts.size(), unigrams.total);
  m.frac_unique_trigrams = ratio(trigrams.counts.size(), trigrams.total);
  m.unigram_entropy = entropy(unigrams);
  m.trigram_entropy = entropy(trigrams);
  return m;
}

std::vector<FamilyScores> family_scores(std::span<const MetricVector> table,
                                        const NormalizationOptions& options) {
  if (table.empty()) throw UsageError("family scores need at least one document");
  std::array<MetricBounds, kMetricCount> bounds{};
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    const Metric metric = kAllMetrics[k];
    if (options.bounds[k]) {
      bounds[k] = *options.bounds[k];
      if (!(bounds[k].max >= bounds[k].min)) {
        throw UsageError("bounds for " + std::string(metric_name(metric)) + " are inverted");
      }
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : table) {
      lo = std::min(lo, row.value(metric));
      hi = std::max(hi, row.value(metric));
    }
    bounds[k] = {lo, hi};
  }

  std::vector<FamilyScores> scores(table.size());
  for (std::size_t j = 0; j < table.size(); ++j) {
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      const Metric metric = kAllMetrics[k];
      const auto [lo, hi] = bounds[k];
      double normalized = 0.0;
      if (hi > lo) {
        normalized = (table[j].value(metric) - lo) / (hi - lo);
        // Only user-supplied bounds can leave the unit interval.
        normalized = std::clamp(normalized, 0.0, 1.0);
      }
      scores[j].get(family_of(metric)) += normalized;
    }
  }
  return scores;
}

}  // namespace wikiclean::heuristics
