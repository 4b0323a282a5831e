#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qlv {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

// A rectangular result table with one serialization to RFC-4180 CSV (CRLF
// line ends, quoting where required, doubles at 17 significant digits) and
// one to JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string format_double(double x); // %.17g, round-trip exact

std::string to_csv(const Table& table);
nlohmann::json to_json(const Table& table);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t value);

} // namespace qlv
