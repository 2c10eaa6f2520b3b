#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/document.hpp"

namespace wikiclean::dedup {

enum class Reason { Unique, ExactDuplicate, NearDuplicate };
std::string_view reason_name(Reason reason);

/// Outcome for one input document. A kept document that represents a
/// duplicate cluster has reason Unique and its own id as cluster_id.
struct DedupVerdict {
  std::string doc_id;
  bool kept = true;
  Reason reason = Reason::Unique;
  std::optional<std::string> cluster_id;
  std::optional<double> similarity;  ///< only for near-duplicates

  friend bool operator==(const DedupVerdict&, const DedupVerdict&) = default;
};

/// `verdicts` is aligned with the input; `kept` preserves input order.
struct DedupResult {
  std::vector<Document> kept;
  std::vector<DedupVerdict> verdicts;
};

std::string format_verdict_line(const DedupVerdict& verdict);

/// SHA-256 of the bytes of `text`.
std::array<std::uint8_t, 32> sha256(std::string_view text);

/// Groups by text (id and title ignored) and keeps the earliest document of
/// each group.
DedupResult exact_dedup(std::span<const Document> docs);

/// Stable 64-bit hash: the first eight bytes of SHA-256, big-endian.
std::uint64_t hash64(std::string_view bytes);

/// Sorted, duplicate-free shingle hashes of one document.
struct ShingleSet {
  std::string doc_id;
  std::vector<std::uint64_t> shingles;
};

/// Hashes every window of `width` consecutive case-folded words. Documents
/// with fewer than `width` words get one shingle per word instead.
ShingleSet shingle(std::string_view text, std::size_t width,
                   std::string doc_id = {});

/// Jaccard similarity of two shingle sets by merge; 1.0 when both are empty.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

/// Universal hash family h_k(x) = (a_k * x + b_k) mod (2^61 - 1), with
/// coefficients drawn from mt19937_64(seed).
class PermutationFamily {
 public:
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  PermutationFamily(std::size_t count, std::uint64_t seed);

  std::size_t size() const { return a_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t apply(std::size_t k, std::uint64_t x) const;

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> a_;
  std::vector<std::uint64_t> b_;
};

struct Signature {
  std::string doc_id;
  std::vector<std::uint64_t> minima;
};

/// Throws DataError("cannot sign empty document") for an empty set.
Signature minhash_signature(const ShingleSet& set,
                            const PermutationFamily& perms);
Signature minhash_signature(const ShingleSet& set, std::size_t permutations,
                            std::uint64_t seed);

/// Fraction of positions where the two signatures agree.
double estimate_jaccard(const Signature& a, const Signature& b);

/// Indices into the signature list, first < second.
struct CandidatePair {
  std::size_t first = 0;
  std::size_t second = 0;
  friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

/// Pairs whose signatures agree on every row of at least one band, sorted and
/// unique. Requires bands * rows == signature length.
std::vector<CandidatePair> lsh_candidates(std::span<const Signature> signatures,
                                          std::size_t bands, std::size_t rows);

struct MinHashParams {
  double threshold = 0.85;
  std::size_t permutations = 128;
  std::size_t bands = 16;
  std::size_t rows = 8;
  std::size_t shingle_width = 5;
  std::uint64_t seed = 1;
  /// Verify candidates by exact shingle-set Jaccard instead of the estimate.
  bool exact_verify = false;
  unsigned workers = 1;

  /// Throws UsageError on inconsistent values.
  void validate() const;
};

/// Candidate pairs from LSH are verified against the threshold, merged by
/// union-find, and each cluster keeps its earliest document. Documents whose
/// text has no words are kept as unique.
DedupResult minhash_dedup(std::span<const Document> docs,
                          const MinHashParams& params = {});

/// Verified duplicate clusters (each sorted ascending, clusters ordered by
/// their first member). Exposed for auditing and tests.
std::vector<std::vector<std::size_t>> minhash_clusters(
    std::span<const Document> docs, const MinHashParams& params = {});

}  // namespace wikiclean::dedup
