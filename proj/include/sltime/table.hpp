#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sltime {

using Cell = std::variant<double, std::string>;

/// Column-labelled rows for CSV/JSON emission.
struct Table {
  std::vector<std::string> columns;  // names carry units, e.g. "tau_ph_fs"
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;  // throws if absent
  double number(std::size_t row, const std::string& name) const;
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// 17 significant digits, '.' decimal point.
std::string format_number(double v);

/// `# key = value` comment lines, then the header row and the data.
void write_csv(std::ostream& out, const Table& table, const ConfigEcho& config);

}  // namespace sltime
