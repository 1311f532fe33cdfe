#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace effconc::cli {

using Cell = std::variant<std::string, double, long long, bool>;

// Header plus rows, rendered either as CSV (header line, '.' decimals, LF) or
// as JSON lines with the same keys.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

enum class Format { csv, json };

void write_table(std::ostream& os, const Table& table, Format format, bool header = true);

// Shortest round-trip decimal; "inf"/"nan" spelled out.
std::string format_double(double v);

}  // namespace effconc::cli
