#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/document.hpp"
#include "wikiclean/wiki_xml.hpp"

namespace wikiclean::io {

enum class CorpusFormat { Jsonl, WikiXml };

CorpusFormat parse_format(std::string_view name);
std::string_view format_name(CorpusFormat format);

/// Parses one line-delimited JSON record. `line_no` is 1-based and only used
/// in error messages.
Document parse_document_line(std::string_view line, std::size_t line_no);

/// Serializes a document as one JSON object (no trailing newline), keys in
/// the order id, title, text, lang.
std::string format_document_line(const Document& doc);

struct ReaderOptions {
  /// Only consulted for wiki-xml input; empty means derive from <dbname>.
  std::string lang;
  bool strip_markup = false;
  std::size_t chunk_bytes = 1 << 16;
};

/// Pull-style corpus reader. Holds at most one decoded document (jsonl) or
/// one parser chunk of pending pages (wiki-xml) at a time.
class CorpusReader {
 public:
  CorpusReader(const std::filesystem::path& path, CorpusFormat format,
               ReaderOptions options = {});
  ~CorpusReader();
  CorpusReader(const CorpusReader&) = delete;
  CorpusReader& operator=(const CorpusReader&) = delete;

  std::optional<Document> next();

  /// Pages skipped by the wiki-xml extractor (zero for jsonl).
  const ExtractStats& extract_stats() const;

  /// Largest line buffer (jsonl) or pending-page queue (wiki-xml), in bytes,
  /// held at any point so far.
  std::size_t peak_buffered_bytes() const { return peak_buffered_; }

 private:
  std::optional<Document> next_jsonl();
  std::optional<Document> next_xml();

  CorpusFormat format_;
  ReaderOptions options_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t peak_buffered_ = 0;
  std::unique_ptr<WikiXmlExtractor> extractor_;
  std::vector<Document> pending_;
  std::size_t pending_pos_ = 0;
  bool eof_ = false;
};

std::vector<Document> read_corpus(const std::filesystem::path& path,
                                  CorpusFormat format,
                                  ReaderOptions options = {});

/// Streams documents into `<path>.partial` and renames it over `path` on
/// commit(). A writer destroyed without commit() removes the partial file.
class CorpusWriter {
 public:
  explicit CorpusWriter(std::filesystem::path path);
  ~CorpusWriter();
  CorpusWriter(const CorpusWriter&) = delete;
  CorpusWriter& operator=(const CorpusWriter&) = delete;

  void write(const Document& doc);
  CorpusStats commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  CorpusStats stats_;
  bool committed_ = false;
};

CorpusStats write_corpus(std::span<const Document> docs,
                         const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace wikiclean::io
