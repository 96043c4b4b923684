#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matchflow::csv {

struct Row {
    std::size_t line = 0; // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields, doubled quotes, CRLF/LF, embedded newlines.
// A leading UTF-8 BOM is skipped. Blank lines are dropped.
std::vector<Row> read(std::string_view text);

std::string escape(std::string_view field);
void append_row(std::string& out, std::span<const std::string> fields);

// Shortest representation that round-trips exactly.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s) noexcept;

} // namespace matchflow::csv
