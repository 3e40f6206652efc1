#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ringwalk/walk_config.hpp"

namespace ringwalk {

/// CSV result table: '#'-prefixed provenance lines, one column-name line,
/// then data rows. Numeric cells are written with 17 significant digits so a
/// write/parse round trip reproduces every double bit-exactly; cells may also
/// hold plain strings (e.g. a category column).
class ResultTable {
 public:
  std::vector<std::string> provenance; // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  static std::string format(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }

  void add_provenance(const std::string& line) { provenance.push_back(line); }

  std::vector<std::string>& start_row() {
    rows.emplace_back();
    rows.back().reserve(columns.size());
    return rows.back();
  }

  void add_row(std::initializer_list<double> values) {
    auto& row = start_row();
    for (const double v : values) row.push_back(format(v));
  }

  double value(std::size_t row, std::size_t col) const {
    return std::strtod(rows[row][col].c_str(), nullptr);
  }

  void write(std::ostream& out) const {
    for (const auto& line : provenance) out << "# " << line << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? "," : "");
      out << '\n';
    }
  }

  std::string str() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }

  /// Everything from the column-name line down: the part of the output that
  /// must be byte-identical across reruns of the same configuration.
  std::string body() const {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? "," : "");
      out << '\n';
    }
    return out.str();
  }

  static ResultTable parse(std::istream& in) {
    ResultTable table;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
        table.provenance.push_back(line.substr(start));
        continue;
      }
      std::vector<std::string> cells;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (!have_columns) {
        table.columns = std::move(cells);
        have_columns = true;
      } else {
        table.rows.push_back(std::move(cells));
      }
    }
    if (!have_columns) throw config_error("table parse: no column-name line found");
    return table;
  }
};

} // namespace ringwalk
