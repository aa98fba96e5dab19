#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "oromet/error.hpp"

namespace oromet::csv {

/// One parsed record plus the 1-based line it started on (for error messages).
struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 subset: comma separator, double-quote quoting, "" escapes,
// LF or CRLF line endings, newlines allowed inside quoted fields.
inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  std::vector<std::string> fields;
  std::string field;
  std::size_t line = 1;
  std::size_t row_start_line = 1;
  bool quoted = false;
  bool any = false;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    any = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back({std::move(fields), row_start_line});
    fields.clear();
    row_start_line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || any)
          throw ParseError("line " + std::to_string(line) + ": stray quote inside unquoted field");
        quoted = true;
        any = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        field += c;
        any = true;
        break;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(row_start_line) + ": unterminated quoted field");
  if (!field.empty() || any || !fields.empty()) end_row();
  return rows;
}

inline std::string escape(std::string_view value) {
  const bool needs_quotes =
      value.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace oromet::csv
