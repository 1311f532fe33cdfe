#include "table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace effconc::cli {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c) {
    struct {
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string out = "\"";
            for (char ch : s) {
                if (ch == '"') out += '"';
                out += ch;
            }
            return out + '"';
        }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(long long i) const { return std::to_string(i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    } visitor;
    return std::visit(visitor, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d))
        return format_double(*d);  // JSON has no inf/nan
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

}  // namespace

void write_table(std::ostream& os, const Table& table, Format format, bool header) {
    if (format == Format::csv) {
        if (header) {
            for (std::size_t i = 0; i < table.columns.size(); ++i)
                os << (i ? "," : "") << table.columns[i];
            os << '\n';
        }
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
        return;
    }
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
        os << obj.dump() << '\n';
    }
}

}  // namespace effconc::cli
