#include "wikiclean/wikitext.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace wikiclean::io {
namespace {

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

// Index just past the balanced closer for an opener at `pos`, or npos.
std::size_t skip_balanced(std::string_view s, std::size_t pos, std::string_view open,
                          std::string_view close) {
  int depth = 0;
  std::size_t i = pos;
  while (i < s.size()) {
    if (s.substr(i, open.size()) == open) {
      ++depth;
      i += open.size();
    } else if (s.substr(i, close.size()) == close) {
      --depth;
      i += close.size();
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

bool is_dropped_namespace(std::string_view target) {
  constexpr std::array<std::string_view, 5> kPrefixes = {"file:", "image:", "category:",
                                                         "media:", "kategori:"};
  return std::any_of(kPrefixes.begin(), kPrefixes.end(),
                     [&](std::string_view p) { return starts_with_ci(target, p); });
}

std::string strip_inline(std::string_view s);

// [[target|label]] -> label, [[target]] -> target.
std::string render_link(std::string_view inner) {
  if (is_dropped_namespace(inner)) return {};
  const auto bar = inner.rfind('|');
  return strip_inline(bar == std::string_view::npos ? inner : inner.substr(bar + 1));
}

std::string strip_inline(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto rest = s.substr(i);
    if (rest.starts_with("<!--")) {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
    } else if (starts_with_ci(rest, "<ref")) {
      const auto tag_end = s.find('>', i);
      if (tag_end == std::string_view::npos) break;
      if (s[tag_end - 1] == '/') {
        i = tag_end + 1;
      } else {
        const auto close = s.find("</ref>", tag_end);
        i = close == std::string_view::npos ? s.size() : close + 6;
      }
    } else if (rest.starts_with("{{")) {
      const auto end = skip_balanced(s, i, "{{", "}}");
      i = end == std::string_view::npos ? s.size() : end;
    } else if (rest.starts_with("{|")) {
      const auto end = skip_balanced(s, i, "{|", "|}");
      i = end == std::string_view::npos ? s.size() : end;
    } else if (rest.starts_with("[[")) {
      const auto end = skip_balanced(s, i, "[[", "]]");
      if (end == std::string_view::npos) {
        i = s.size();
      } else {
        out += render_link(s.substr(i + 2, end - i - 4));
        i = end;
      }
    } else if (rest.starts_with("[http") || rest.starts_with("[//")) {
      const auto end = s.find(']', i);
      if (end == std::string_view::npos) {
        i = s.size();
      } else {
        const auto inner = s.substr(i + 1, end - i - 1);
        const auto space = inner.find(' ');
        if (space != std::string_view::npos) out += inner.substr(space + 1);
        i = end + 1;
      }
    } else if (rest.starts_with("''")) {
      while (i < s.size() && s[i] == '\'') ++i;
    } else if (rest.starts_with("<") && rest.size() > 1 &&
               (std::isalpha(static_cast<unsigned char>(rest[1])) || rest[1] == '/')) {
      const auto end = s.find('>', i);
      i = end == std::string_view::npos ? s.size() : end + 1;
    } else if (rest.starts_with("&nbsp;")) {
      out += ' ';
      i += 6;
    } else if (rest.starts_with("&amp;")) {
      out += '&';
      i += 5;
    } else if (rest.starts_with("&lt;")) {
      out += '<';
      i += 4;
    } else if (rest.starts_with("&gt;")) {
      out += '>';
      i += 4;
    } else if (rest.starts_with("&quot;")) {
      out += '"';
      i += 6;
    } else {
      out += s[i++];
    }
  }
  return out;
}

}  // namespace

std::string strip_wikitext(std::string_view wikitext) {
  const std::string inline_stripped = strip_inline(wikitext);
  std::string out;
  out.reserve(inline_stripped.size());
  std::size_t pos = 0;
  while (pos <= inline_stripped.size()) {
    auto nl = inline_stripped.find('\n', pos);
    if (nl == std::string::npos) nl = inline_stripped.size();
    std::string_view line(inline_stripped.data() + pos, nl - pos);
    // Heading markers.
    if (line.size() >= 2 && line.front() == '=') {
      while (!line.empty() && line.front() == '=') line.remove_prefix(1);
      while (!line.empty() && (line.back() == '=' || line.back() == ' ')) line.remove_suffix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    }
    // List and indent markers.
    while (!line.empty() && (line.front() == '*' || line.front() == '#' ||
                             line.front() == ':' || line.front() == ';')) {
      line.remove_prefix(1);
    }
    if (!out.empty()) out += '\n';
    out += line;
    pos = nl + 1;
  }
  // Collapse runs of blank lines left behind by removed blocks.
  std::string collapsed;
  collapsed.reserve(out.size());
  int newlines = 0;
  for (char c : out) {
    if (c == '\n') {
      if (++newlines > 2) continue;
    } else {
      newlines = 0;
    }
    collapsed += c;
  }
  const auto first = collapsed.find_first_not_of(" \n\t");
  if (first == std::string::npos) return {};
  const auto last = collapsed.find_last_not_of(" \n\t");
  return collapsed.substr(first, last - first + 1);
}

}  // namespace wikiclean::io
