#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace patscape::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  // 1-based physical line where each row starts (header is line 1).
  std::vector<std::size_t> lines;
};

// RFC-4180 reader: quoted fields may contain commas, quotes ("") and newlines.
// CRLF and LF line endings are both accepted; a UTF-8 BOM is skipped.
Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

// Throws DataError naming the file when the header differs from `expected`.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& source);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

// Fixed 6-significant-digit rendering used by every emitted table.
std::string format_number(double value);

}  // namespace patscape::csv
