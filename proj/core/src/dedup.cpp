#include "wikiclean/dedup.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "wikiclean/error.hpp"
#include "wikiclean/parallel.hpp"
#include "wikiclean/text.hpp"
#include "wikiclean/union_find.hpp"

namespace wikiclean::dedup {
namespace {

using Digest = std::array<std::uint8_t, 32>;

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d[i];
    return h;
  }
};

__extension__ typedef unsigned __int128 u128;

std::uint64_t mod_mersenne(u128 x) {
  constexpr std::uint64_t p = PermutationFamily::kPrime;
  std::uint64_t s = static_cast<std::uint64_t>(x & p) + static_cast<std::uint64_t>(x >> 61);
  s = (s & p) + (s >> 61);
  return s >= p ? s - p : s;
}

// Bucket key for one band; collisions are resolved by comparing rows.
std::uint64_t band_key(const std::uint64_t* rows, std::size_t count) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t z = rows[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h ^= z ^ (z >> 31);
  }
  return h;
}

// Runs of members with identical rows in one band, each run sorted by index.
using Run = std::vector<std::uint32_t>;

std::vector<Run> band_runs(std::span<const Signature> sigs,
                           std::span<const std::uint32_t> members, std::size_t band,
                           std::size_t rows) {
  const std::size_t offset = band * rows;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  for (std::uint32_t m : members) {
    buckets[band_key(sigs[m].minima.data() + offset, rows)].push_back(m);
  }
  std::vector<Run> runs;
  for (auto& [key, bucket] : buckets) {
    if (bucket.size() < 2) continue;
    auto rows_of = [&](std::uint32_t m) {
      return std::span<const std::uint64_t>(sigs[m].minima.data() + offset, rows);
    };
    std::stable_sort(bucket.begin(), bucket.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto ra = rows_of(a);
      const auto rb = rows_of(b);
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    std::size_t start = 0;
    for (std::size_t i = 1; i <= bucket.size(); ++i) {
      if (i == bucket.size() || !std::ranges::equal(rows_of(bucket[start]), rows_of(bucket[i]))) {
        if (i - start >= 2) {
          Run run(bucket.begin() + static_cast<std::ptrdiff_t>(start),
                  bucket.begin() + static_cast<std::ptrdiff_t>(i));
          std::sort(run.begin(), run.end());
          runs.push_back(std::move(run));
        }
        start = i;
      }
    }
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

void check_bands(std::size_t bands, std::size_t rows, std::size_t length) {
  if (bands == 0 || rows == 0 || bands * rows != length) {
    throw UsageError("LSH banding requires bands * rows == permutations (" +
                     std::to_string(bands) + " * " + std::to_string(rows) +
                     " != " + std::to_string(length) + ")");
  }
}

struct ClusterState {
  std::vector<std::vector<std::size_t>> clusters;  // size >= 2, sorted
  std::vector<std::optional<double>> link_similarity;
};

ClusterState cluster_near_duplicates(std::span<const Document> docs,
                                     const MinHashParams& params) {
  params.validate();
  const std::size_t n = docs.size();
  std::vector<ShingleSet> sets(n);
  parallel_for(n, params.workers, [&](std::size_t i) {
    sets[i] = shingle(docs[i].text, params.shingle_width, docs[i].id);
  });

  std::vector<std::uint32_t> signed_docs;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sets[i].shingles.empty()) signed_docs.push_back(static_cast<std::uint32_t>(i));
  }
  const PermutationFamily perms(params.permutations, params.seed);
  std::vector<Signature> sigs(n);
  parallel_for(signed_docs.size(), params.workers, [&](std::size_t k) {
    const auto i = signed_docs[k];
    sigs[i] = minhash_signature(sets[i], perms);
  });

  // One table per band, built independently.
  std::vector<std::vector<Run>> runs_per_band(params.bands);
  parallel_for(params.bands, params.workers, [&](std::size_t b) {
    runs_per_band[b] = band_runs(sigs, signed_docs, b, params.rows);
  });

  UnionFind uf(n);
  ClusterState state;
  state.link_similarity.assign(n, std::nullopt);
  for (const auto& runs : runs_per_band) {
    for (const auto& run : runs) {
      for (std::size_t x = 0; x < run.size(); ++x) {
        for (std::size_t y = x + 1; y < run.size(); ++y) {
          const std::size_t a = run[x];
          const std::size_t b = run[y];
          if (uf.connected(a, b)) continue;
          const double sim = params.exact_verify ? exact_jaccard(sets[a], sets[b])
                                                 : estimate_jaccard(sigs[a], sigs[b]);
          if (sim < params.threshold) continue;
          uf.unite(a, b);
          if (!state.link_similarity[a]) state.link_similarity[a] = sim;
          if (!state.link_similarity[b]) state.link_similarity[b] = sim;
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::size_t> cluster_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (uf.component_size(i) < 2) continue;
    const auto root = uf.find(i);
    auto [it, inserted] = cluster_of_root.try_emplace(root, state.clusters.size());
    if (inserted) state.clusters.emplace_back();
    state.clusters[it->second].push_back(i);
  }
  return state;
}

}  // namespace

std::string_view reason_name(Reason reason) {
  switch (reason) {
    case Reason::Unique: return "unique";
    case Reason::ExactDuplicate: return "exact-duplicate";
    case Reason::NearDuplicate: return "near-duplicate";
  }
  return "unique";
}

std::string format_verdict_line(const DedupVerdict& v) {
  nlohmann::ordered_json record;
  record["doc_id"] = v.doc_id;
  record["kept"] = v.kept;
  record["reason"] = reason_name(v.reason);
  record["cluster_id"] = v.cluster_id ? nlohmann::ordered_json(*v.cluster_id) : nlohmann::ordered_json(nullptr);
  record["similarity"] = v.similarity ? nlohmann::ordered_json(*v.similarity) : nlohmann::ordered_json(nullptr);
  return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::array<std::uint8_t, 32> sha256(std::string_view text) {
  Digest digest{};
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest.data());
  return digest;
}

std::uint64_t hash64(std::string_view bytes) {
  const auto digest = sha256(bytes);
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < 8; ++i) h = (h << 8) | digest[i];
  return h;
}

DedupResult exact_dedup(std::span<const Document> docs) {
  DedupResult result;
  result.verdicts.resize(docs.size());
  std::unordered_map<Digest, std::vector<std::size_t>, DigestHash> groups;
  std::vector<std::size_t> rep_of(docs.size());
  std::vector<std::size_t> members(docs.size(), 0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& reps = groups[sha256(docs[i].text)];
    auto same = std::find_if(reps.begin(), reps.end(),
                             [&](std::size_t r) { return docs[r].text == docs[i].text; });
    if (same == reps.end()) {
      reps.push_back(i);
      rep_of[i] = i;
    } else {
      rep_of[i] = *same;
    }
    ++members[rep_of[i]];
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& v = result.verdicts[i];
    v.doc_id = docs[i].id;
    const std::size_t rep = rep_of[i];
    if (rep == i) {
      v.kept = true;
      v.reason = Reason::Unique;
      if (members[i] > 1) v.cluster_id = docs[i].id;
      result.kept.push_back(docs[i]);
    } else {
      v.kept = false;
      v.reason = Reason::ExactDuplicate;
      v.cluster_id = docs[rep].id;
    }
  }
  return result;
}

ShingleSet shingle(std::string_view text, std::size_t width, std::string doc_id) {
  if (width == 0) throw UsageError("shingle width must be at least 1");
  ShingleSet set;
  set.doc_id = std::move(doc_id);
  const auto tokens = text::split_whitespace(text);
  if (tokens.empty()) return set;
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (auto t : tokens) words.push_back(text::case_fold(t));

  if (words.size() < width) {
    for (const auto& w : words) set.shingles.push_back(hash64(w));
  } else {
    std::string window;
    for (std::size_t i = 0; i + width <= words.size(); ++i) {
      window.clear();
      for (std::size_t j = 0; j < width; ++j) {
        if (j) window += ' ';
        window += words[i + j];
      }
      set.shingles.push_back(hash64(window));
    }
  }
  std::sort(set.shingles.begin(), set.shingles.end());
  set.shingles.erase(std::unique(set.shingles.begin(), set.shingles.end()), set.shingles.end());
  return set;
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.shingles.empty() && b.shingles.empty()) return 1.0;
  std::size_t common = 0;
  auto i = a.shingles.begin();
  auto j = b.shingles.begin();
  while (i != a.shingles.end() && j != b.shingles.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.shingles.size() + b.shingles.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

PermutationFamily::PermutationFamily(std::size_t count, std::uint64_t seed) : seed_(seed) {
  if (count == 0) throw UsageError("permutation count must be at least 1");
  std::mt19937_64 engine(seed);
  a_.resize(count);
  b_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    a_[k] = 1 + engine() % (kPrime - 1);
    b_[k] = engine() % kPrime;
  }
}

std::uint64_t PermutationFamily::apply(std::size_t k, std::uint64_t x) const {
  const std::uint64_t reduced = mod_mersenne(x);
  return mod_mersenne(static_cast<u128>(a_[k]) * reduced + b_[k]);
}

Signature minhash_signature(const ShingleSet& set, const PermutationFamily& perms) {
  if (set.shingles.empty()) throw DataError("cannot sign empty document");
  Signature sig;
  sig.doc_id = set.doc_id;
  sig.minima.assign(perms.size(), std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t x : set.shingles) {
    for (std::size_t k = 0; k < perms.size(); ++k) {
      sig.minima[k] = std::min(sig.minima[k], perms.apply(k, x));
    }
  }
  return sig;
}

Signature minhash_signature(const ShingleSet& set, std::size_t permutations,
                            std::uint64_t seed) {
  return minhash_signature(set, PermutationFamily(permutations, seed));
}

double estimate_jaccard(const Signature& a, const Signature& b) {
  if (a.minima.size() != b.minima.size() || a.minima.empty()) {
    throw UsageError("signatures differ in length");
  }
  std::size_t equal = 0;
  for (std::size_t k = 0; k < a.minima.size(); ++k) equal += a.minima[k] == b.minima[k];
  return static_cast<double>(equal) / static_cast<double>(a.minima.size());
}

std::vector<CandidatePair> lsh_candidates(std::span<const Signature> signatures,
                                          std::size_t bands, std::size_t rows) {
  std::vector<std::uint32_t> members(signatures.size());
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    check_bands(bands, rows, signatures[i].minima.size());
    members[i] = static_cast<std::uint32_t>(i);
  }
  std::vector<CandidatePair> pairs;
  for (std::size_t b = 0; b < bands && !signatures.empty(); ++b) {
    for (const auto& run : band_runs(signatures, members, b, rows)) {
      for (std::size_t x = 0; x < run.size(); ++x) {
        for (std::size_t y = x + 1; y < run.size(); ++y) pairs.push_back({run[x], run[y]});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

void MinHashParams::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw UsageError("dedup threshold must be in (0, 1]");
  }
  if (permutations == 0) throw UsageError("permutation count must be at least 1");
  if (shingle_width == 0) throw UsageError("shingle width must be at least 1");
  check_bands(bands, rows, permutations);
}

std::vector<std::vector<std::size_t>> minhash_clusters(std::span<const Document> docs,
                                                       const MinHashParams& params) {
  return cluster_near_duplicates(docs, params).clusters;
}

DedupResult minhash_dedup(std::span<const Document> docs, const MinHashParams& params) {
  const auto state = cluster_near_duplicates(docs, params);
  std::vector<std::optional<std::size_t>> rep_of(docs.size());
  for (const auto& cluster : state.clusters) {
    for (std::size_t member : cluster) rep_of[member] = cluster.front();
  }
  DedupResult result;
  result.verdicts.resize(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& v = result.verdicts[i];
    v.doc_id = docs[i].id;
    if (!rep_of[i] || *rep_of[i] == i) {
      v.kept = true;
      v.reason = Reason::Unique;
      if (rep_of[i]) v.cluster_id = docs[i].id;
      result.kept.push_back(docs[i]);
    } else {
      v.kept = false;
      v.reason = Reason::NearDuplicate;
      v.cluster_id = docs[*rep_of[i]].id;
      v.similarity = state.link_similarity[i];
    }
  }
  return result;
}

}  // namespace wikiclean::dedup
