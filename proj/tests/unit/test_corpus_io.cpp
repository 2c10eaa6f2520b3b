#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "wikiclean/corpus_io.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/wiki_xml.hpp"

namespace fs = std::filesystem;
using namespace wikiclean;
namespace gen = wikiclean::testing;

namespace {

fs::path fixture(const char* name) { return fs::path(WIKICLEAN_FIXTURES) / name; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wikiclean_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST(CorpusIo, ReadsJsonlInFileOrder) {
  TempDir dir;
  write_text(dir.path / "c.jsonl",
             "{\"id\":\"b\",\"title\":\"B\",\"text\":\"second\",\"lang\":\"yo\"}\n"
             "{\"id\":\"a\",\"title\":\"A\",\"text\":\"first\",\"lang\":\"yo\"}\n");
  const auto docs = io::read_corpus(dir.path / "c.jsonl", io::CorpusFormat::Jsonl);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].id, "b");
  EXPECT_EQ(docs[1].text, "first");
}

TEST(CorpusIo, MissingTextNamesKeyAndLine) {
  try {
    io::parse_document_line(R"({"id":"1","title":"t","lang":"yo"})", 1);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing key: text"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(CorpusIo, MalformedLineNamesLineNumber) {
  TempDir dir;
  write_text(dir.path / "c.jsonl",
             "{\"id\":\"a\",\"title\":\"\",\"text\":\"x\",\"lang\":\"yo\"}\n{not json\n");
  try {
    io::read_corpus(dir.path / "c.jsonl", io::CorpusFormat::Jsonl);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(CorpusIo, WriteThenReadRoundTrips100Docs) {
  TempDir dir;
  gen::Gen g(11);
  const auto vocab = gen::vocabulary(g, 50);
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) {
    docs.push_back({"id" + std::to_string(i), "T \"quoted\"\n" + std::to_string(i),
                    gen::join(gen::draw_words(g, vocab, 10)) + " Ìtọ́kasí 漢字\t", "yo"});
  }
  const auto stats = io::write_corpus(docs, dir.path / "out.jsonl");
  const auto back = io::read_corpus(dir.path / "out.jsonl", io::CorpusFormat::Jsonl);
  EXPECT_EQ(back, docs);
  EXPECT_EQ(stats, corpus_stats(back));
}

TEST(CorpusIo, EmptyStreamGivesEmptyFileAndZeroStats) {
  TempDir dir;
  const auto stats = io::write_corpus({}, dir.path / "empty.jsonl");
  EXPECT_EQ(stats, (CorpusStats{0, 0}));
  EXPECT_EQ(fs::file_size(dir.path / "empty.jsonl"), 0u);
}

TEST(CorpusIo, CharCountIsScalarValues) {
  const std::vector<Document> docs = {{"1", "", "ab", "yo"}, {"2", "", "c", "yo"}};
  EXPECT_EQ(corpus_stats(docs).char_count, 3u);
  EXPECT_EQ(corpus_stats(docs).doc_count, 2u);
}

TEST(CorpusIo, UncommittedWriterLeavesNoFile) {
  TempDir dir;
  {
    io::CorpusWriter w(dir.path / "out.jsonl");
    w.write({"1", "", "x", "yo"});
  }
  EXPECT_FALSE(fs::exists(dir.path / "out.jsonl"));
  EXPECT_FALSE(fs::exists(dir.path / "out.jsonl.partial"));
}

TEST(CorpusIo, UnwritableDestinationFails) {
  TempDir dir;
  write_text(dir.path / "blocker", "a regular file");
  EXPECT_THROW(io::write_corpus({}, dir.path / "blocker" / "out.jsonl"), Error);
}

TEST(CorpusIo, FormatNames) {
  EXPECT_EQ(io::parse_format("jsonl"), io::CorpusFormat::Jsonl);
  EXPECT_EQ(io::parse_format("wiki-xml"), io::CorpusFormat::WikiXml);
  EXPECT_THROW(io::parse_format("csv"), UsageError);
}

TEST(WikiXml, KeepsOnlyArticleNamespace) {
  const auto docs = io::read_corpus(fixture("dump_talk_pages.xml"), io::CorpusFormat::WikiXml);
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0].title, "Èkó");
  EXPECT_EQ(docs[1].id, "3");
  EXPECT_EQ(docs[2].text, "Ìbàdàn & Ògbómọ̀ṣọ́");
  for (const auto& d : docs) EXPECT_EQ(d.lang, "yo");
}

TEST(WikiXml, ProjectNamespaceSkipped) {
  std::ifstream in(fixture("dump_ns_0_0_4.xml"));
  std::vector<Document> docs;
  const auto stats = io::extract_wiki_pages(in, {}, [&](Document&& d) { docs.push_back(std::move(d)); });
  EXPECT_EQ(docs.size(), 2u);
  EXPECT_EQ(stats.skipped_namespace, 1u);
  EXPECT_EQ(stats.pages_seen, 3u);
}

TEST(WikiXml, EmptyTextCountedInSkipTally) {
  const std::string xml =
      "<mediawiki><page><title>E</title><ns>0</ns><id>1</id><revision><id>2</id><text/>"
      "</revision></page></mediawiki>";
  std::istringstream in(xml);
  std::size_t emitted = 0;
  const auto stats = io::extract_wiki_pages(in, {"yo", false}, [&](Document&&) { ++emitted; });
  EXPECT_EQ(emitted, 0u);
  EXPECT_EQ(stats.skipped_no_text, 1u);

  std::ifstream file(fixture("dump_empty_text.xml"));
  std::vector<Document> docs;
  const auto s2 = io::extract_wiki_pages(file, {}, [&](Document&& d) { docs.push_back(std::move(d)); });
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].title, "Full");
  EXPECT_EQ(s2.skipped_no_text, 2u);
}

TEST(WikiXml, SinglePageMapsFields) {
  const auto docs = io::read_corpus(fixture("dump_single.xml"), io::CorpusFormat::WikiXml);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0], (Document{"42", "Ìtọ́kasí", "Ìtọ́kasí", "yo"}));
}

TEST(WikiXml, LatestRevisionWins) {
  const auto docs = io::read_corpus(fixture("dump_two_revisions.xml"), io::CorpusFormat::WikiXml);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].text, "new text");
}

TEST(WikiXml, TruncatedDumpReportsByteOffset) {
  try {
    io::read_corpus(fixture("dump_truncated.xml"), io::CorpusFormat::WikiXml);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos) << e.what();
  }
}

TEST(WikiXml, ExplicitLangOverridesDbname) {
  io::ReaderOptions options;
  options.lang = "ceb";
  const auto docs = io::read_corpus(fixture("dump_single.xml"), io::CorpusFormat::WikiXml, options);
  EXPECT_EQ(docs.at(0).lang, "ceb");
}

TEST(WikiXml, MarkupPassesThroughByDefault) {
  const auto raw = io::read_corpus(fixture("dump_talk_pages.xml"), io::CorpusFormat::WikiXml);
  EXPECT_NE(raw[1].text.find("'''"), std::string::npos);
  io::ReaderOptions strip;
  strip.strip_markup = true;
  const auto clean = io::read_corpus(fixture("dump_talk_pages.xml"), io::CorpusFormat::WikiXml, strip);
  EXPECT_EQ(clean[1].text.find("'''"), std::string::npos);
  EXPECT_NE(clean[1].text.find("àtijọ́"), std::string::npos);
}

// Streams a file much larger than the cap and checks the reader never held
// more than the largest record plus a fixed allowance.
TEST(CorpusIo, StreamingMemoryIsBoundedByLargestDocument) {
  TempDir dir;
  const std::size_t doc_bytes = 4096;
  const std::size_t n_docs = 4000;  // ~16 MiB
  {
    io::CorpusWriter w(dir.path / "big.jsonl");
    for (std::size_t i = 0; i < n_docs; ++i) {
      w.write({std::to_string(i), "", std::string(doc_bytes, static_cast<char>('a' + i % 26)), "yo"});
    }
    w.commit();
  }
  const std::size_t cap = 64 * 1024;
  ASSERT_GT(fs::file_size(dir.path / "big.jsonl"), 100 * cap);

  io::CorpusReader reader(dir.path / "big.jsonl", io::CorpusFormat::Jsonl);
  std::size_t n = 0;
  while (reader.next()) ++n;
  EXPECT_EQ(n, n_docs);
  EXPECT_LE(reader.peak_buffered_bytes(), cap);

  // Same check through the XML extractor.
  {
    std::ofstream xml(dir.path / "big.xml");
    xml << "<mediawiki><siteinfo><dbname>yowiki</dbname></siteinfo>\n";
    for (std::size_t i = 0; i < 2000; ++i) {
      xml << "<page><title>P" << i << "</title><ns>0</ns><id>" << i
          << "</id><revision><id>1</id><text>" << std::string(doc_bytes, 'x') << "</text></revision></page>\n";
    }
    xml << "</mediawiki>\n";
  }
  io::ReaderOptions options;
  options.chunk_bytes = 16 * 1024;
  io::CorpusReader xml_reader(dir.path / "big.xml", io::CorpusFormat::WikiXml, options);
  n = 0;
  while (xml_reader.next()) ++n;
  EXPECT_EQ(n, 2000u);
  EXPECT_LE(xml_reader.peak_buffered_bytes(), cap);
}

TEST(CorpusIo, DropEmptyKeepsOrder) {
  std::vector<Document> docs = {{"1", "", "a", "yo"}, {"2", "", "", "yo"}, {"3", "", "b", "yo"}};
  drop_empty(docs);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].id, "3");
}

TEST(CorpusIo, StageDeltaFractions) {
  const auto d = make_delta("s", {10, 100}, {5, 25});
  EXPECT_DOUBLE_EQ(d.frac_docs_removed(), 0.5);
  EXPECT_DOUBLE_EQ(d.frac_chars_removed(), 0.75);
  EXPECT_DOUBLE_EQ(make_delta("s", {0, 0}, {0, 0}).frac_docs_removed(), 0.0);
}
