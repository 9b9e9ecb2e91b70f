#include "wellpose/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wellpose/error.hpp"

namespace wellpose {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return csv_field(std::get<std::string>(c));
}

std::string json_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c))
        return std::isfinite(*d) ? format_double(*d) : nlohmann::json(format_double(*d)).dump();
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return nlohmann::json(std::get<std::string>(c)).dump();
}

}  // namespace

void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size()) throw ValidationError("table: row width differs from the header");
    rows.push_back(std::move(row));
}

TableFormat parse_format(const std::string& name)
{
    if (name == "csv") return TableFormat::Csv;
    if (name == "jsonl") return TableFormat::Jsonl;
    throw ValidationError("format: expected csv or jsonl, got '" + name + "'");
}

std::string extension(TableFormat format)
{
    return format == TableFormat::Csv ? ".csv" : ".jsonl";
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const Table& t)
{
    std::ostringstream os;
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << csv_field(t.columns[j]);
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << csv_cell(r[j]);
        os << '\n';
    }
    return os.str();
}

std::string to_jsonl(const Table& t)
{
    std::ostringstream os;
    for (const auto& r : t.rows) {
        os << '{';
        for (std::size_t j = 0; j < r.size(); ++j)
            os << (j ? "," : "") << nlohmann::json(t.columns[j]).dump() << ':' << json_cell(r[j]);
        os << "}\n";
    }
    return os.str();
}

void emit(const Table& table, const std::string& path, TableFormat format)
{
    if (table.empty()) throw ValidationError("emit: refusing to write an empty table to " + path);
    const std::string body = format == TableFormat::Csv ? to_csv(table) : to_jsonl(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << body;
    out.close();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace wellpose
