#include "wikiclean/corpus_io.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "wikiclean/error.hpp"
#include "wikiclean/text.hpp"

namespace wikiclean {

double StageDelta::frac_docs_removed() const {
  return docs_before == 0 ? 0.0
                          : static_cast<double>(docs_before - docs_after) /
                                static_cast<double>(docs_before);
}

double StageDelta::frac_chars_removed() const {
  return chars_before == 0 ? 0.0
                           : static_cast<double>(chars_before - chars_after) /
                                 static_cast<double>(chars_before);
}

CorpusStats corpus_stats(std::span<const Document> docs) {
  CorpusStats stats;
  stats.doc_count = docs.size();
  for (const auto& doc : docs) stats.char_count += text::char_count(doc.text);
  return stats;
}

StageDelta make_delta(std::string stage_name, const CorpusStats& before,
                      const CorpusStats& after) {
  return StageDelta{std::move(stage_name), before.doc_count, after.doc_count,
                    before.char_count, after.char_count};
}

void drop_empty(std::vector<Document>& docs) {
  std::erase_if(docs, [](const Document& d) { return d.text.empty(); });
}

namespace io {

using json = nlohmann::json;

CorpusFormat parse_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::Jsonl;
  if (name == "wiki-xml" || name == "xml") return CorpusFormat::WikiXml;
  throw UsageError("unknown corpus format: " + std::string(name));
}

std::string_view format_name(CorpusFormat format) {
  return format == CorpusFormat::Jsonl ? "jsonl" : "wiki-xml";
}

Document parse_document_line(std::string_view line, std::size_t line_no) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError("line " + std::to_string(line_no) + ": malformed JSON (" +
                    e.what() + ")");
  }
  if (!record.is_object()) {
    throw DataError("line " + std::to_string(line_no) + ": record is not an object");
  }
  auto field = [&](const char* key) -> std::string {
    auto it = record.find(key);
    if (it == record.end()) {
      throw DataError("line " + std::to_string(line_no) + ": missing key: " + key);
    }
    if (!it->is_string()) {
      throw DataError("line " + std::to_string(line_no) + ": key " + key +
                      " is not a string");
    }
    return it->get<std::string>();
  };
  Document doc;
  doc.id = field("id");
  doc.title = field("title");
  doc.text = field("text");
  doc.lang = field("lang");
  if (doc.id.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": empty id");
  }
  return doc;
}

std::string format_document_line(const Document& doc) {
  nlohmann::ordered_json record;
  record["id"] = doc.id;
  record["title"] = doc.title;
  record["text"] = doc.text;
  record["lang"] = doc.lang;
  return record.dump(-1, ' ', false, json::error_handler_t::replace);
}

CorpusReader::CorpusReader(const std::filesystem::path& path, CorpusFormat format,
                           ReaderOptions options)
    : format_(format), options_(std::move(options)) {
  in_.open(path, std::ios::binary);
  if (!in_) throw DataError("cannot open " + path.string());
  if (format_ == CorpusFormat::WikiXml) {
    ExtractOptions xo{options_.lang, options_.strip_markup};
    extractor_ = std::make_unique<WikiXmlExtractor>(
        xo, [this](Document&& doc) { pending_.push_back(std::move(doc)); });
  }
}

CorpusReader::~CorpusReader() = default;

const ExtractStats& CorpusReader::extract_stats() const {
  static const ExtractStats kNone;
  return extractor_ ? extractor_->stats() : kNone;
}

std::optional<Document> CorpusReader::next() {
  return format_ == CorpusFormat::Jsonl ? next_jsonl() : next_xml();
}

std::optional<Document> CorpusReader::next_jsonl() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    peak_buffered_ = std::max(peak_buffered_, line_.capacity());
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty()) continue;
    return parse_document_line(line_, line_no_);
  }
  if (in_.bad()) throw DataError("read error after line " + std::to_string(line_no_));
  return std::nullopt;
}

std::optional<Document> CorpusReader::next_xml() {
  std::string chunk(options_.chunk_bytes, '\0');
  while (pending_pos_ >= pending_.size()) {
    pending_.clear();
    pending_pos_ = 0;
    if (eof_) return std::nullopt;
    in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got > 0) extractor_->feed(std::string_view(chunk.data(), got));
    if (got < chunk.size()) {
      eof_ = true;
      extractor_->finish();
    }
    std::size_t held = 0;
    for (const auto& d : pending_) held += d.text.size() + d.title.size() + d.id.size();
    peak_buffered_ = std::max(peak_buffered_, held);
  }
  return std::move(pending_[pending_pos_++]);
}

std::vector<Document> read_corpus(const std::filesystem::path& path,
                                  CorpusFormat format, ReaderOptions options) {
  CorpusReader reader(path, format, std::move(options));
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return docs;
}

CorpusWriter::CorpusWriter(std::filesystem::path path)
    : path_(std::move(path)), partial_(path_.string() + ".partial") {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  out_.open(partial_, std::ios::binary | std::ios::trunc);
  if (!out_) throw DataError("cannot write " + partial_.string());
}

CorpusWriter::~CorpusWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(partial_, ec);
  }
}

void CorpusWriter::write(const Document& doc) {
  out_ << format_document_line(doc) << '\n';
  if (!out_) throw DataError("write failed: " + partial_.string());
  stats_.doc_count += 1;
  stats_.char_count += text::char_count(doc.text);
}

CorpusStats CorpusWriter::commit() {
  out_.flush();
  out_.close();
  if (out_.fail()) throw DataError("write failed: " + partial_.string());
  std::error_code ec;
  std::filesystem::rename(partial_, path_, ec);
  if (ec) throw DataError("cannot rename " + partial_.string() + ": " + ec.message());
  committed_ = true;
  return stats_;
}

CorpusStats write_corpus(std::span<const Document> docs,
                         const std::filesystem::path& path) {
  CorpusWriter writer(path);
  for (const auto& doc : docs) writer.write(doc);
  return writer.commit();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const std::filesystem::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(partial, ec);
      throw DataError("write failed: " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw DataError("cannot rename " + partial.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace io
}  // namespace wikiclean
