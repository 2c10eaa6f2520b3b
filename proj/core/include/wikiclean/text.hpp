#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by every module. All character counts in this library
// are Unicode scalar values; malformed byte sequences decode to U+FFFD.
namespace wikiclean::text {

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t char_count(std::string_view utf8);

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);
void append_codepoint(std::string& out, char32_t cp);

/// True for code points with the Unicode White_Space property.
bool is_space(char32_t cp);

/// Splits on Unicode whitespace and drops empty tokens. Views point into
/// `utf8`, which must outlive the result.
std::vector<std::string_view> split_whitespace(std::string_view utf8);

/// Simple (1:1) Unicode case folding of every code point.
std::string case_fold(std::string_view utf8);

/// Trims Unicode whitespace from both ends.
std::string_view trim(std::string_view utf8);

}  // namespace wikiclean::text
