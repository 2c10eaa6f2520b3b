#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikiclean/document.hpp"

namespace wikiclean::script {

/// A Unicode Script property value, held as its ICU UScriptCode.
struct Script {
  std::int32_t code = 0;

  /// Long property value name, e.g. "Latin", "Devanagari", "Common".
  std::string name() const;

  friend auto operator<=>(const Script&, const Script&) = default;
};

/// Resolves a long ("Devanagari") or short ("Deva") Script value name.
/// Throws DataError("unknown script: <name>") if it is not a Script value.
Script parse_script(std::string_view name);

/// Script property of a single code point.
Script script_of(char32_t cp);

bool is_shared_script(Script s);  ///< Common or Inherited

/// Wiki language code -> officially documented script(s).
class ScriptRegistry {
 public:
  /// Parses `code: Script[, Script...]` lines; '#' starts a comment.
  static ScriptRegistry parse(std::string_view text);
  static ScriptRegistry load(const std::filesystem::path& path);
  /// The registry compiled into the library.
  static ScriptRegistry builtin();

  /// Adds or replaces one language; `scripts` must be nonempty.
  void set(std::string lang, std::set<Script> scripts);
  /// Replaces every language present in `overrides`.
  void merge(const ScriptRegistry& overrides);

  bool contains(std::string_view lang) const;
  /// Throws DataError("no script entry for <lang>") when absent.
  const std::set<Script>& scripts_for(std::string_view lang) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::set<Script>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::set<Script>, std::less<>> entries_;
};

/// Character counts per script name.
std::map<std::string, std::size_t> script_profile(std::string_view text);

struct ScriptFilterOutcome {
  Document document;
  std::size_t removed_chars = 0;
  bool dropped = false;  ///< filtered text is empty after trimming
};

/// Keeps characters whose Script is allowed for `doc.lang` or is Common or
/// Inherited; everything else is deleted in place.
ScriptFilterOutcome filter_document(const Document& doc,
                                    const ScriptRegistry& registry);

/// Same filter on bare text with an explicit allowed set.
std::string filter_text(std::string_view text, const std::set<Script>& allowed,
                        std::size_t* removed_chars = nullptr);

struct ScriptFilterResult {
  std::vector<Document> kept;
  std::uint64_t chars_before = 0;
  std::uint64_t chars_removed = 0;  ///< includes characters of dropped docs
  std::uint64_t docs_dropped = 0;
};

/// Filters a whole corpus on `workers` threads; output order is input order.
ScriptFilterResult filter_corpus(std::span<const Document> docs,
                                 const ScriptRegistry& registry,
                                 unsigned workers = 1);

std::string_view default_registry_text();

}  // namespace wikiclean::script
