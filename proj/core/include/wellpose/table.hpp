#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace wellpose {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Column-ordered result table.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    bool empty() const { return rows.empty(); }
};

enum class TableFormat { Csv, Jsonl };

TableFormat parse_format(const std::string& name);
std::string extension(TableFormat format);

/// %.17g; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);

/// Header plus one line per row (csv), or one JSON object per row with keys in column order (jsonl).
/// Throws ValidationError for an empty table (no file is created) and IoError on write failure.
void emit(const Table& table, const std::string& path, TableFormat format);

std::string to_csv(const Table& table);
std::string to_jsonl(const Table& table);

}  // namespace wellpose
