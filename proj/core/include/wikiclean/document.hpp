#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wikiclean {

/// One article.
struct Document {
  std::string id;
  std::string title;
  std::string text;
  std::string lang;

  friend bool operator==(const Document&, const Document&) = default;
};

struct CorpusStats {
  std::uint64_t doc_count = 0;
  std::uint64_t char_count = 0;  ///< Unicode scalar values

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Before/after volume for one pipeline stage.
struct StageDelta {
  std::string stage_name;
  std::uint64_t docs_before = 0;
  std::uint64_t docs_after = 0;
  std::uint64_t chars_before = 0;
  std::uint64_t chars_after = 0;

  double frac_docs_removed() const;
  double frac_chars_removed() const;

  friend bool operator==(const StageDelta&, const StageDelta&) = default;
};

CorpusStats corpus_stats(std::span<const Document> docs);

StageDelta make_delta(std::string stage_name, const CorpusStats& before,
                      const CorpusStats& after);

/// Removes documents whose text is empty, preserving order.
void drop_empty(std::vector<Document>& docs);

}  // namespace wikiclean
