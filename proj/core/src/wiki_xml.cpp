#include "wikiclean/wiki_xml.hpp"

#include <expat.h>

#include <string>
#include <vector>

#include "wikiclean/error.hpp"
#include "wikiclean/wikitext.hpp"

namespace wikiclean::io {
namespace {

enum class Field { None, DbName, Title, Namespace, PageId, Text };

// "yowiki" -> "yo", "zh_yuewiki" -> "zh-yue".
std::string lang_from_dbname(std::string dbname) {
  constexpr std::string_view kSuffix = "wiki";
  if (dbname.size() > kSuffix.size() && dbname.ends_with(kSuffix)) {
    dbname.resize(dbname.size() - kSuffix.size());
  }
  for (char& c : dbname) {
    if (c == '_') c = '-';
  }
  return dbname;
}

}  // namespace

struct WikiXmlExtractor::State {
  ExtractOptions options;
  Sink sink;
  XML_Parser parser = nullptr;
  ExtractStats stats;
  std::string error;

  std::vector<std::string> path;
  Field field = Field::None;
  std::string buffer;

  std::string dbname;
  bool in_page = false;
  std::string title;
  std::string ns;
  std::string page_id;
  bool has_text = false;
  std::string text;

  std::string_view parent() const {
    return path.size() >= 2 ? std::string_view(path[path.size() - 2]) : std::string_view();
  }

  void start(std::string_view name, const XML_Char** attrs) {
    path.emplace_back(name);
    if (name == "page") {
      in_page = true;
      title.clear();
      ns.clear();
      page_id.clear();
      has_text = false;
      text.clear();
      return;
    }
    if (name == "revision" && in_page) {
      // Only the last revision of a page counts.
      has_text = false;
      text.clear();
      return;
    }
    const auto p = parent();
    field = Field::None;
    if (name == "dbname" && p == "siteinfo") field = Field::DbName;
    else if (name == "title" && p == "page") field = Field::Title;
    else if (name == "ns" && p == "page") field = Field::Namespace;
    else if (name == "id" && p == "page") field = Field::PageId;
    else if (name == "text" && p == "revision") {
      bool deleted = false;
      for (auto a = attrs; a && *a; a += 2) {
        if (std::string_view(a[0]) == "deleted") deleted = true;
      }
      field = deleted ? Field::None : Field::Text;
    }
    buffer.clear();
  }

  void characters(std::string_view data) {
    if (field != Field::None) buffer.append(data);
  }

  void end(std::string_view name) {
    switch (field) {
      case Field::DbName: dbname = buffer; break;
      case Field::Title: title = buffer; break;
      case Field::Namespace: ns = buffer; break;
      case Field::PageId: page_id = buffer; break;
      case Field::Text:
        text = buffer;
        has_text = true;
        break;
      case Field::None: break;
    }
    field = Field::None;
    buffer.clear();
    if (name == "page") finish_page();
    if (!path.empty()) path.pop_back();
  }

  void finish_page() {
    in_page = false;
    ++stats.pages_seen;
    if (!ns.empty() && ns != "0") {
      ++stats.skipped_namespace;
      return;
    }
    if (options.strip_markup && has_text) text = strip_wikitext(text);
    if (!has_text || text.empty()) {
      ++stats.skipped_no_text;
      return;
    }
    Document doc;
    doc.id = page_id.empty() ? title : page_id;
    doc.title = std::move(title);
    doc.text = std::move(text);
    doc.lang = options.lang.empty() ? lang_from_dbname(dbname) : options.lang;
    ++stats.pages_emitted;
    sink(std::move(doc));
  }

  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<State*>(self)->start(name, attrs);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) {
    static_cast<State*>(self)->end(name);
  }
  static void XMLCALL on_chars(void* self, const XML_Char* s, int len) {
    static_cast<State*>(self)->characters(std::string_view(s, static_cast<std::size_t>(len)));
  }

  void parse(const char* data, std::size_t len, bool final) {
    if (XML_Parse(parser, data, static_cast<int>(len), final) == XML_STATUS_ERROR) {
      throw DataError("malformed XML at byte " +
                      std::to_string(XML_GetCurrentByteIndex(parser)) + ": " +
                      XML_ErrorString(XML_GetErrorCode(parser)));
    }
  }
};

WikiXmlExtractor::WikiXmlExtractor(ExtractOptions options, Sink sink)
    : state_(std::make_unique<State>()) {
  state_->options = std::move(options);
  state_->sink = std::move(sink);
  state_->parser = XML_ParserCreate("UTF-8");
  if (!state_->parser) throw std::bad_alloc();
  XML_SetUserData(state_->parser, state_.get());
  XML_SetElementHandler(state_->parser, &State::on_start, &State::on_end);
  XML_SetCharacterDataHandler(state_->parser, &State::on_chars);
}

WikiXmlExtractor::~WikiXmlExtractor() {
  if (state_ && state_->parser) XML_ParserFree(state_->parser);
}

void WikiXmlExtractor::feed(std::string_view chunk) {
  // XML_Parse takes an int length.
  constexpr std::size_t kMax = 1 << 30;
  while (chunk.size() > kMax) {
    state_->parse(chunk.data(), kMax, false);
    chunk.remove_prefix(kMax);
  }
  state_->parse(chunk.data(), chunk.size(), false);
}

void WikiXmlExtractor::finish() { state_->parse(nullptr, 0, true); }

const ExtractStats& WikiXmlExtractor::stats() const { return state_->stats; }

ExtractStats extract_wiki_pages(std::istream& in, const ExtractOptions& options,
                                const WikiXmlExtractor::Sink& sink) {
  WikiXmlExtractor extractor(options, sink);
  std::string chunk(1 << 16, '\0');
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    extractor.feed(std::string_view(chunk.data(), got));
  }
  extractor.finish();
  return extractor.stats();
}

}  // namespace wikiclean::io
