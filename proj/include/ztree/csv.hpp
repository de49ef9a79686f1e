#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ztree::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Text of the leading `#` lines, without the marker.
  std::vector<std::string> comments;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// Leading lines starting with '#' are collected as comments. Every row
/// must have as many fields as the header.
Table parse(std::string_view text);

Table read_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Full-match parse of a decimal number (surrounding blanks not allowed).
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace ztree::csv
