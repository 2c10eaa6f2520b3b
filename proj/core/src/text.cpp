#include "wikiclean/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace wikiclean::text {
namespace {

// Decodes the code point starting at offset i and advances i. Ill-formed
// sequences yield U+FFFD and consume at least one byte.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  auto offset = static_cast<std::int32_t>(i);
  UChar32 c = 0;
  U8_NEXT(bytes, offset, length, c);
  i = static_cast<std::size_t>(offset);
  return c < 0 ? char32_t{0xFFFD} : static_cast<char32_t>(c);
}

}  // namespace

std::size_t char_count(std::string_view utf8) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < utf8.size(); ++n) next_codepoint(utf8, i);
  return n;
}

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) out.push_back(next_codepoint(utf8, i));
  return out;
}

void append_codepoint(std::string& out, char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    // Surrogates and out-of-range values are not scalar values.
    len = 0;
    U8_APPEND_UNSAFE(buf, len, 0xFFFD);
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string encode(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t cp : codepoints) append_codepoint(out, cp);
  return out;
}

bool is_space(char32_t cp) {
  return u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_WHITE_SPACE);
}

std::vector<std::string_view> split_whitespace(std::string_view utf8) {
  std::vector<std::string_view> tokens;
  std::size_t start = std::string_view::npos;
  for (std::size_t i = 0; i < utf8.size();) {
    const std::size_t at = i;
    const char32_t cp = next_codepoint(utf8, i);
    if (is_space(cp)) {
      if (start != std::string_view::npos) {
        tokens.push_back(utf8.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) tokens.push_back(utf8.substr(start));
  return tokens;
}

std::string case_fold(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) {
    const char32_t cp = next_codepoint(utf8, i);
    append_codepoint(out, static_cast<char32_t>(
                              u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT)));
  }
  return out;
}

std::string_view trim(std::string_view utf8) {
  std::size_t begin = std::string_view::npos;
  std::size_t end = 0;
  for (std::size_t i = 0; i < utf8.size();) {
    const std::size_t at = i;
    if (!is_space(next_codepoint(utf8, i))) {
      if (begin == std::string_view::npos) begin = at;
      end = i;
    }
  }
  if (begin == std::string_view::npos) return {};
  return utf8.substr(begin, end - begin);
}

}  // namespace wikiclean::text
