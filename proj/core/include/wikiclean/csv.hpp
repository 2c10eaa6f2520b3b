#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikiclean::csv {

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);
/// Shortest decimal representation that round-trips through strtod.
std::string format_double(double value);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  /// Throws DataError("missing column: <name>") when absent.
  std::size_t require_column(std::string_view name) const;
};

/// RFC 4180 parser. Rows are checked against the header width; errors name
/// the 1-based record number.
Table parse(std::string_view text);

double parse_double(std::string_view field, std::size_t record,
                    std::string_view column);

}  // namespace wikiclean::csv
