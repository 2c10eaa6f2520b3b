#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "wikiclean/corpus_io.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/pipeline.hpp"
#include "wikiclean/text.hpp"

using namespace wikiclean;
using namespace wikiclean::pipeline;
namespace fs = std::filesystem;
namespace gen = wikiclean::testing;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           (std::string("wikiclean_pipeline_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig base_config() {
  PipelineConfig c;
  c.lang = "yo";
  return c;
}

std::vector<Document> clean_corpus(std::uint64_t seed, std::size_t n) {
  gen::Gen g(seed);
  const auto vocab = gen::vocabulary(g, 4000);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back({std::to_string(i), "T" + std::to_string(i),
                    gen::join(gen::draw_words(g, vocab, 50 + g.below(200))), "yo"});
  }
  return docs;
}

std::set<std::string> ids(const std::vector<Document>& docs) {
  std::set<std::string> out;
  for (const auto& d : docs) out.insert(d.id);
  return out;
}

std::uint64_t chars_of(const std::vector<Document>& docs, const std::set<std::string>& which) {
  std::uint64_t n = 0;
  for (const auto& d : docs) {
    if (which.count(d.id)) n += text::char_count(d.text);
  }
  return n;
}

}  // namespace

TEST(Primary, NoOpCorpusIsIdentity) {
  const auto docs = clean_corpus(1, 80);
  const auto r = run_primary(base_config(), docs);
  EXPECT_EQ(r.corpus, docs);
  ASSERT_EQ(r.manifest.stages.size(), 3u);
  const char* names[] = {"script", "exact-dedup", "minhash-dedup"};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = r.manifest.stages[i];
    EXPECT_EQ(s.stage_name, names[i]);
    EXPECT_EQ(s.docs_before, s.docs_after);
    EXPECT_EQ(s.chars_before, s.chars_after);
  }
  EXPECT_NO_THROW(validate_manifest(r.manifest));
}

TEST(Primary, PlantedDeltasMatchConstruction) {
  const auto planted = gen::planted_pipeline_corpus(5);
  const auto r = run_primary(base_config(), planted.docs);
  const auto* script = r.manifest.stage("script");
  const auto* exact = r.manifest.stage("exact-dedup");
  const auto* near = r.manifest.stage("minhash-dedup");
  ASSERT_TRUE(script && exact && near);
  EXPECT_EQ(script->docs_before, 1000u);
  EXPECT_EQ(script->docs_after, 1000u);
  EXPECT_EQ(script->chars_before - script->chars_after, planted.foreign_chars);
  EXPECT_EQ(exact->docs_before - exact->docs_after, planted.exact_duplicates.size());
  EXPECT_EQ(exact->chars_before - exact->chars_after, chars_of(planted.docs, planted.exact_duplicates));
  EXPECT_EQ(near->docs_before - near->docs_after, planted.near_duplicates.size());
  EXPECT_EQ(near->chars_before - near->chars_after, chars_of(planted.docs, planted.near_duplicates));

  const auto kept = ids(r.corpus);
  for (const auto& id : planted.exact_duplicates) EXPECT_FALSE(kept.count(id)) << id;
  for (const auto& id : planted.near_duplicates) EXPECT_FALSE(kept.count(id)) << id;
  for (const auto& d : r.corpus) {
    for (const auto& w : planted.foreign_words) EXPECT_EQ(d.text.find(w), std::string::npos);
  }
  EXPECT_EQ(r.verdicts.size(), 1000u + 800u);
}

TEST(Primary, TemplateClusterCollapses) {
  // A bot-stamped wiki: 80 articles from one template differing in a few slots.
  gen::Gen g(6);
  const auto vocab = gen::vocabulary(g, 3000);
  const auto frame = gen::draw_words(g, vocab, 300);
  std::vector<Document> docs;
  for (int i = 0; i < 80; ++i) {
    auto words = frame;
    for (std::size_t slot : {10u, 150u, 290u}) words[slot] = "place" + std::to_string(i) + "x" + std::to_string(slot);
    docs.push_back({"t" + std::to_string(i), "", gen::join(words), "yo"});
  }
  for (int i = 0; i < 20; ++i) {
    docs.push_back({"h" + std::to_string(i), "", gen::join(gen::draw_words(g, vocab, 200)), "yo"});
  }
  g.shuffle(docs);
  const auto r = run_primary(base_config(), docs);
  const auto* near = r.manifest.stage("minhash-dedup");
  ASSERT_NE(near, nullptr);
  EXPECT_EQ(near->docs_before - near->docs_after, 79u);
  std::size_t templates_left = 0;
  for (const auto& d : r.corpus) templates_left += d.id[0] == 't';
  EXPECT_EQ(templates_left, 1u);
  EXPECT_EQ(r.corpus.size(), 21u);
}

TEST(Primary, UnknownLanguageFailsWithStageName) {
  auto docs = clean_corpus(2, 5);
  for (auto& d : docs) d.lang = "zz-unknown";
  PipelineConfig c;
  try {
    run_primary(c, docs);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("stage script"), std::string::npos) << e.what();
  }
}

TEST(Heuristic, PlantedJunkRemoved) {
  const auto planted = gen::planted_pipeline_corpus(5);
  const auto config = base_config();
  auto p = run_primary(config, planted.docs);
  const auto h = run_heuristic(config, p.corpus, p.manifest);
  std::size_t hit = 0;
  for (const auto& d : h.removed) hit += planted.junk.count(d.id);
  EXPECT_GE(static_cast<double>(hit), 0.95 * static_cast<double>(h.removed.size()));
  EXPECT_GE(static_cast<double>(hit), 0.95 * static_cast<double>(planted.junk.size()));
  ASSERT_EQ(h.manifest.stages.size(), 4u);
  EXPECT_EQ(h.manifest.stages.back().stage_name, "heuristic-prune");
  EXPECT_EQ(h.manifest.thresholds.size(), 3u);
  EXPECT_NO_THROW(validate_manifest(h.manifest));
}

TEST(Heuristic, IdenticalLengthCorpusIsDegenerate) {
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i) docs.push_back({std::to_string(i), "", "lorem ipsum dolor sit amet", "yo"});
  const auto config = base_config();
  try {
    run_heuristic(config, docs, new_manifest(config));
    FAIL();
  } catch (const DegenerateError& e) {
    EXPECT_NE(std::string(e.what()).find("absolute"), std::string::npos) << e.what();
  }
}

TEST(Heuristic, SkipDegenerateWarns) {
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i) docs.push_back({std::to_string(i), "", "lorem ipsum dolor sit amet", "yo"});
  auto config = base_config();
  config.heuristic.skip_degenerate = true;
  const auto h = run_heuristic(config, docs, new_manifest(config));
  EXPECT_EQ(h.corpus, docs);
  EXPECT_EQ(h.manifest.warnings.size(), 3u);
  for (const auto& t : h.manifest.thresholds) EXPECT_FALSE(t.skipped_reason.empty());
}

TEST(Heuristic, DisabledIsIdentity) {
  const auto docs = clean_corpus(3, 60);
  auto config = base_config();
  config.heuristic.enabled = false;
  const auto h = run_heuristic(config, docs, new_manifest(config));
  EXPECT_EQ(h.corpus, docs);
  EXPECT_TRUE(h.removed.empty());
  ASSERT_EQ(h.manifest.stages.size(), 1u);
  EXPECT_EQ(h.manifest.stages[0].docs_after, 60u);

  config.heuristic.enabled = true;
  for (const char* f : {"absolute", "relative", "entropy"}) config.heuristic.sides[f] = SideSpec::Off;
  EXPECT_EQ(run_heuristic(config, docs, new_manifest(config)).corpus, docs);
}

TEST(Heuristic, BothSidesRecordTwoThresholds) {
  const auto docs = clean_corpus(4, 200);
  auto config = base_config();
  config.heuristic.sides["entropy"] = SideSpec::Both;
  const auto h = run_heuristic(config, docs, new_manifest(config));
  std::size_t entropy = 0;
  for (const auto& t : h.manifest.thresholds) entropy += t.target == "entropy";
  EXPECT_EQ(entropy, 2u);
}

TEST(RandomControl, Examples) {
  const auto docs = clean_corpus(5, 100);
  EXPECT_EQ(run_random_control(docs, 0, 1), docs);
  EXPECT_TRUE(run_random_control(docs, 100, 1).empty());
  EXPECT_THROW(run_random_control(docs, 101, 1), UsageError);
  const auto a = run_random_control(docs, 10, 9);
  EXPECT_EQ(a.size(), 90u);
  EXPECT_EQ(run_random_control(docs, 10, 9), a);
  // Survivors keep input order.
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(std::stoi(a[i - 1].id), std::stoi(a[i].id));
}

TEST(RandomControl, MatchedOnPrimaryCount) {
  const auto planted = gen::planted_pipeline_corpus(5);
  const auto r = run_primary(base_config(), planted.docs);
  EXPECT_EQ(primary_removed_count(r.manifest), 300u);
}

TEST(Files, ComposedRunEqualsRunAll) {
  TempDir dir;
  const auto planted = gen::planted_pipeline_corpus(8);
  io::write_corpus(planted.docs, dir.path / "raw.jsonl");
  auto config = base_config();
  config.input = dir.path / "raw.jsonl";

  config.output_dir = dir.path / "all";
  run_all_files(config);

  config.output_dir = dir.path / "split";
  run_primary_files(config);
  run_heuristic_files(config, config.output_dir / "primary.jsonl");

  for (const char* f : {"primary.jsonl", "verdicts.jsonl", "heuristic.jsonl", "metrics.csv",
                        "thresholds.json"}) {
    EXPECT_EQ(slurp(dir.path / "all" / f), slurp(dir.path / "split" / f)) << f;
  }
  auto all = read_manifest(dir.path / "all" / "manifest.json");
  auto split = read_manifest(dir.path / "split" / "manifest.json");
  all.config.erase("output.dir");
  split.config.erase("output.dir");
  EXPECT_EQ(format_manifest(all), format_manifest(split));
  EXPECT_TRUE(fs::exists(dir.path / "all" / "random.jsonl"));
  EXPECT_TRUE(fs::exists(dir.path / "all" / "report" / "retention.csv"));
  EXPECT_EQ(io::read_corpus(dir.path / "all" / "random.jsonl", io::CorpusFormat::Jsonl).size(),
            planted.docs.size() - 300);
}

TEST(Files, ByteIdenticalAcrossWorkerCounts) {
  TempDir dir;
  const auto planted = gen::planted_pipeline_corpus(9);
  io::write_corpus(planted.docs, dir.path / "raw.jsonl");
  auto config = base_config();
  config.input = dir.path / "raw.jsonl";
  for (unsigned w : {1u, 3u}) {
    config.workers = w;
    config.output_dir = dir.path / ("w" + std::to_string(w));
    run_all_files(config);
  }
  for (const char* f : {"primary.jsonl", "verdicts.jsonl", "heuristic.jsonl", "heuristic_removed.jsonl",
                        "metrics.csv", "thresholds.json", "random.jsonl", "report/retention.csv",
                        "report/report_notes.txt"}) {
    EXPECT_EQ(slurp(dir.path / "w1" / f), slurp(dir.path / "w3" / f)) << f;
  }
  auto a = read_manifest(dir.path / "w1" / "manifest.json");
  auto b = read_manifest(dir.path / "w3" / "manifest.json");
  a.config.erase("output.dir");
  b.config.erase("output.dir");
  EXPECT_EQ(format_manifest(a), format_manifest(b));
}

TEST(Files, FailureLeavesInvalidManifest) {
  TempDir dir;
  std::ofstream(dir.path / "raw.jsonl") << "{\"id\":\"1\",\"title\":\"t\",\"text\":\"x\"}\nnot json\n";
  auto config = base_config();
  config.input = dir.path / "raw.jsonl";
  config.output_dir = dir.path / "out";
  EXPECT_THROW(run_primary_files(config), DataError);
  const auto m = read_manifest(dir.path / "out" / "manifest.json");
  EXPECT_FALSE(m.valid);
  EXPECT_FALSE(m.error.empty());
  EXPECT_FALSE(fs::exists(dir.path / "out" / "primary.jsonl"));
}

TEST(Manifest, ChoicesRecorded) {
  const auto m = new_manifest(base_config());
  for (const char* key : {"script.shared_scripts", "dedup.verification", "heuristic.threshold_mode",
                          "heuristic.normalization", "heuristic.entropy_base", "threshold.objective",
                          "analysis.standardization", "control.matching"}) {
    EXPECT_TRUE(m.choices.count(key)) << key;
  }
}
