#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "wikiclean/dedup.hpp"
#include "wikiclean/heuristics.hpp"
#include "wikiclean/script_filter.hpp"
#include "wikiclean/thresholding.hpp"

using namespace wikiclean;

namespace {

std::string random_text(std::mt19937_64& rng, std::size_t words) {
  static const char* kSyllables[] = {"ba", "ko", "ri", "nu", "te", "sa", "lo", "mi", "de", "ya"};
  std::uniform_int_distribution<int> syl(0, 9), len(1, 4);
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) out += ' ';
    for (int s = len(rng); s > 0; --s) out += kSyllables[syl(rng)];
  }
  return out;
}

std::vector<Document> corpus(std::size_t n, std::size_t words) {
  std::mt19937_64 rng(1);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back({std::to_string(i), "", random_text(rng, words), "yo"});
  return docs;
}

}  // namespace

static void BM_Shingle(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto text = random_text(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dedup::shingle(text, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Shingle)->Arg(200)->Arg(2000);

static void BM_Signature(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto set = dedup::shingle(random_text(rng, static_cast<std::size_t>(state.range(0))), 5);
  const dedup::PermutationFamily perms(128, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dedup::minhash_signature(set, perms));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.shingles.size()));
}
BENCHMARK(BM_Signature)->Arg(200)->Arg(2000);

static void BM_LshCandidates(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)), 150);
  const dedup::PermutationFamily perms(128, 1);
  std::vector<dedup::Signature> sigs;
  for (const auto& d : docs) sigs.push_back(dedup::minhash_signature(dedup::shingle(d.text, 5), perms));
  for (auto _ : state) benchmark::DoNotOptimize(dedup::lsh_candidates(sigs, 16, 8));
}
BENCHMARK(BM_LshCandidates)->Arg(1000)->Arg(10000);

static void BM_MinHashDedup(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)), 150);
  for (auto _ : state) benchmark::DoNotOptimize(dedup::minhash_dedup(docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinHashDedup)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ComputeMetrics(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto text = random_text(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(heuristics::compute_metrics(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ComputeMetrics)->Arg(200)->Arg(2000);

static void BM_ScriptFilter(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto text = random_text(rng, 1000) + " Привет 漢字";
  const std::set<script::Script> allowed = {script::parse_script("Latin")};
  for (auto _ : state) benchmark::DoNotOptimize(script::filter_text(text, allowed));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ScriptFilter);

static void BM_Kde(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd(0, 1);
  std::vector<double> sample(static_cast<std::size_t>(state.range(0)));
  for (auto& x : sample) x = nd(rng);
  const auto grid = threshold::linspace(-4, 4, 500);
  for (auto _ : state) benchmark::DoNotOptimize(threshold::kde(sample, grid, 0.1));
}
BENCHMARK(BM_Kde)->Arg(500)->Arg(5000);

static void BM_SelectThreshold(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(2, 0.5);
  std::vector<double> values(static_cast<std::size_t>(state.range(0)));
  for (auto& x : values) x = nd(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold::select_threshold(values, threshold::Side::Low, 0.05, 1));
  }
}
BENCHMARK(BM_SelectThreshold)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
