#include "ordcap/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ordcap/errors.hpp"

namespace ordcap {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw InvariantError("row has " + std::to_string(row.size()) + " fields, header has " +
                         std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_number(double value, int significant) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", significant, value);
  return buffer;
}

std::string render_text(const Table& table) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(table.columns);
  for (const auto& row : table.rows) {
    std::vector<std::string> line;
    for (double value : row) line.push_back(format_number(value, 6));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(table.columns.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out += "  ";
      out.append(width[c] - line[c].size(), ' ');
      out += line[c];
    }
    out += '\n';
  }
  return out;
}

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format_number(row[c], 15);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field) {
  if (field == "inf") return INFINITY;
  if (field == "-inf") return -INFINITY;
  if (field == "nan") return NAN;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) throw ConfigError("not a number: '" + field + "'");
  return value;
}

}  // namespace

Table parse_csv(const std::string& text) {
  std::stringstream stream(text);
  std::string line;
  Table table;
  if (!std::getline(stream, line)) throw ConfigError("CSV has no header");
  table.columns = split(line);
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& field : split(line)) row.push_back(parse_number(field));
    if (row.size() != table.columns.size()) throw ConfigError("CSV row width differs from header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace ordcap
