#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <string>
#include <string_view>

#include "wikiclean/document.hpp"

namespace wikiclean::io {

struct ExtractStats {
  std::uint64_t pages_seen = 0;
  std::uint64_t pages_emitted = 0;
  std::uint64_t skipped_namespace = 0;  ///< pages outside namespace 0
  std::uint64_t skipped_no_text = 0;    ///< latest revision lacks text
};

struct ExtractOptions {
  /// Language code stamped on every document; empty means derive it from the
  /// dump's <dbname> ("yowiki" -> "yo").
  std::string lang;
  bool strip_markup = false;
};

/// Incremental MediaWiki export-XML extractor. Feed it arbitrary byte chunks;
/// it invokes the sink once per namespace-0 page, using the text of the last
/// <revision> in the page. Truncated or malformed XML raises DataError with
/// the byte offset where parsing stopped.
class WikiXmlExtractor {
 public:
  using Sink = std::function<void(Document&&)>;

  WikiXmlExtractor(ExtractOptions options, Sink sink);
  ~WikiXmlExtractor();
  WikiXmlExtractor(const WikiXmlExtractor&) = delete;
  WikiXmlExtractor& operator=(const WikiXmlExtractor&) = delete;

  void feed(std::string_view chunk);
  void finish();

  const ExtractStats& stats() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Convenience wrapper: reads the whole stream through the extractor.
ExtractStats extract_wiki_pages(std::istream& in, const ExtractOptions& options,
                                const WikiXmlExtractor::Sink& sink);

}  // namespace wikiclean::io
