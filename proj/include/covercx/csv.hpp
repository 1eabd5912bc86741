#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covercx::csv {

using Row = std::vector<std::string>;

// RFC 4180 table: header row plus data rows. Quoted fields may contain
// commas, doubled quotes and line breaks.
struct Table {
    Row header;
    std::vector<Row> rows;
    std::vector<std::size_t> lines;  // 1-based source line where each row starts

    std::optional<std::size_t> column(std::string_view name) const;
};

/// Throws ParseError on an unterminated quoted field.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

}  // namespace covercx::csv
