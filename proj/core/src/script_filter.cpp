#include "wikiclean/script_filter.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <fstream>
#include <sstream>

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/parallel.hpp"
#include "wikiclean/text.hpp"

namespace wikiclean::script {
namespace {

std::string_view strip(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string Script::name() const {
  const char* n = uscript_getName(static_cast<UScriptCode>(code));
  return n ? std::string(n) : std::string("Unknown");
}

Script parse_script(std::string_view name) {
  const std::string key(strip(name));
  const int32_t value = u_getPropertyValueEnum(UCHAR_SCRIPT, key.c_str());
  if (key.empty() || value == UCHAR_INVALID_CODE) {
    throw DataError("unknown script: " + key);
  }
  return Script{value};
}

Script script_of(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode code = uscript_getScript(static_cast<UChar32>(cp), &status);
  return Script{U_SUCCESS(status) ? static_cast<std::int32_t>(code)
                                  : static_cast<std::int32_t>(USCRIPT_UNKNOWN)};
}

bool is_shared_script(Script s) {
  return s.code == USCRIPT_COMMON || s.code == USCRIPT_INHERITED;
}

ScriptRegistry ScriptRegistry::parse(std::string_view text) {
  ScriptRegistry registry;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = strip(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw DataError("registry line " + std::to_string(line_no) + ": expected 'code: scripts'");
    }
    std::string code(strip(line.substr(0, colon)));
    if (code.empty()) {
      throw DataError("registry line " + std::to_string(line_no) + ": empty language code");
    }
    if (registry.contains(code)) {
      throw DataError("registry line " + std::to_string(line_no) +
                      ": duplicate language code: " + code);
    }
    std::set<Script> scripts;
    std::string_view rest = line.substr(colon + 1);
    // Accept an optional YAML-ish [a, b] list.
    rest = strip(rest);
    if (rest.starts_with('[') && rest.ends_with(']')) rest = rest.substr(1, rest.size() - 2);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = strip(rest.substr(0, comma));
      if (!item.empty()) scripts.insert(parse_script(item));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (scripts.empty()) {
      throw DataError("registry line " + std::to_string(line_no) + ": no scripts for " + code);
    }
    registry.entries_.emplace(std::move(code), std::move(scripts));
  }
  return registry;
}

ScriptRegistry ScriptRegistry::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

ScriptRegistry ScriptRegistry::builtin() {
  static const ScriptRegistry registry = parse(default_registry_text());
  return registry;
}

void ScriptRegistry::set(std::string lang, std::set<Script> scripts) {
  if (scripts.empty()) throw DataError("no scripts for " + lang);
  entries_.insert_or_assign(std::move(lang), std::move(scripts));
}

void ScriptRegistry::merge(const ScriptRegistry& overrides) {
  for (const auto& [lang, scripts] : overrides.entries_) set(lang, scripts);
}

bool ScriptRegistry::contains(std::string_view lang) const {
  return entries_.find(lang) != entries_.end();
}

const std::set<Script>& ScriptRegistry::scripts_for(std::string_view lang) const {
  const auto it = entries_.find(lang);
  if (it == entries_.end()) throw DataError("no script entry for " + std::string(lang));
  return it->second;
}

std::map<std::string, std::size_t> script_profile(std::string_view text) {
  std::map<std::int32_t, std::size_t> by_code;
  for (char32_t cp : text::decode(text)) ++by_code[script_of(cp).code];
  std::map<std::string, std::size_t> profile;
  for (const auto& [code, count] : by_code) profile[Script{code}.name()] += count;
  return profile;
}

std::string filter_text(std::string_view text, const std::set<Script>& allowed,
                        std::size_t* removed_chars) {
  std::string out;
  out.reserve(text.size());
  std::size_t removed = 0;
  for (char32_t cp : text::decode(text)) {
    const Script s = script_of(cp);
    if (is_shared_script(s) || allowed.contains(s)) {
      text::append_codepoint(out, cp);
    } else {
      ++removed;
    }
  }
  if (removed_chars) *removed_chars = removed;
  return out;
}

ScriptFilterOutcome filter_document(const Document& doc, const ScriptRegistry& registry) {
  const auto& allowed = registry.scripts_for(doc.lang);
  ScriptFilterOutcome outcome;
  outcome.document = doc;
  outcome.document.text = filter_text(doc.text, allowed, &outcome.removed_chars);
  outcome.dropped = text::trim(outcome.document.text).empty();
  return outcome;
}

ScriptFilterResult filter_corpus(std::span<const Document> docs,
                                 const ScriptRegistry& registry, unsigned workers) {
  std::vector<ScriptFilterOutcome> outcomes(docs.size());
  std::vector<std::size_t> lengths(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    outcomes[i] = filter_document(docs[i], registry);
    lengths[i] = text::char_count(docs[i].text);
  });
  ScriptFilterResult result;
  result.kept.reserve(docs.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    result.chars_before += lengths[i];
    if (o.dropped) {
      // The whole remainder leaves the corpus with the document.
      result.chars_removed += lengths[i];
      ++result.docs_dropped;
    } else {
      result.chars_removed += o.removed_chars;
      result.kept.push_back(std::move(o.document));
    }
  }
  return result;
}

}  // namespace wikiclean::script
