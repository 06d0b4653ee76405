#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ordcap {

/// Homogeneous numeric result set with a fixed column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws InvariantError when the row width differs from the header.
  void add_row(std::vector<double> row);
};

/// Shortest "%.*g" spelling at the given significant digits; inf and nan spelled as such.
std::string format_number(double value, int significant);

/// Right-aligned human table at 6 significant digits. Empty tables give the header line only.
std::string render_text(const Table& table);

/// Comma-separated with a header row, 15 significant digits, '\n' line ends.
std::string render_csv(const Table& table);

/// Inverse of render_csv. Throws ConfigError on malformed input.
Table parse_csv(const std::string& text);

}  // namespace ordcap
