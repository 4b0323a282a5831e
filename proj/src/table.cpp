#include "qlv/table.hpp"

#include <cstdio>
#include <stdexcept>

namespace qlv {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("Table: row width must match column count");
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_to_string(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::get<std::string>(cell);
}

} // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(table.columns[c]);
    }
    out += "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv_escape(cell_to_string(row[c]));
        }
        out += "\r\n";
    }
    return out;
}

nlohmann::json to_json(const Table& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) {
            if (const auto* i = std::get_if<std::int64_t>(&cell))
                r.push_back(*i);
            else if (const auto* u = std::get_if<std::uint64_t>(&cell))
                r.push_back(*u);
            else if (const auto* d = std::get_if<double>(&cell))
                r.push_back(*d);
            else
                r.push_back(std::get<std::string>(cell));
        }
        rows.push_back(std::move(r));
    }
    return nlohmann::json{{"columns", table.columns}, {"rows", std::move(rows)}};
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64(const std::string& data) { return fnv1a64(data.data(), data.size()); }

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace qlv
