#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tritree::csv {

struct Field {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field>;

// RFC 4180 reader: quoted fields, doubled quotes, embedded separators and
// newlines, LF or CRLF line endings. A trailing newline does not produce an
// empty record; blank lines are skipped.
std::vector<Record> parse(std::string_view text);

// Quotes the field when it contains a separator, quote, or line break, or
// when `force` is set.
std::string escape(std::string_view field, bool force = false);

// Shortest text that parses back to the same double ("nan", "inf", "-inf"
// for non-finite values).
std::string format_double(double v);

// Strict full-field parse of a finite or non-finite double.
std::optional<double> parse_double(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace tritree::csv
