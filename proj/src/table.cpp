#include "sltime/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sltime/error.hpp"

namespace sltime {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw NumericError("table row has the wrong number of cells");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("no column named '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  return std::get<double>(rows.at(row).at(column(name)));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);  // "C" locale is the program default
  return buf;
}

void write_csv(std::ostream& out, const Table& table, const ConfigEcho& config) {
  for (const auto& [k, v] : config) out << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* d = std::get_if<double>(&row[i]))
        out << format_number(*d);
      else
        out << std::get<std::string>(row[i]);
    }
    out << '\n';
  }
}

}  // namespace sltime
