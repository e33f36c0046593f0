#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace neontrap::cli {

using Cell = std::variant<double, std::string>;

struct Column {
  std::string name;
  std::string unit;  // "-" for dimensionless or text columns
};

struct ResultTable {
  std::string block;  // distinguishes the tables of one command
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  // Throws std::invalid_argument when the row width differs from the column count.
  void add_row(std::vector<Cell> row);
  const std::string* find_metadata(const std::string& key) const;
};

// 9 significant digits; inf, -inf, nan spelled out.
std::string format_number(double value);

// Comment lines "# key: value", then the header "name[unit],...", then rows; LF endings.
std::string to_csv(const ResultTable& table);

// {"metadata": {...}, "columns": [{"name", "unit"}], "rows": [[...]]}; non-finite numbers
// are written as the strings "inf", "-inf", "nan".
std::string to_json(const ResultTable& table);

// Reads to_csv output back. Numeric-looking cells become doubles.
ResultTable parse_csv(const std::string& text);
// Reads to_json output back; the strings "inf", "-inf", "nan" in numeric position become doubles.
ResultTable parse_json(const std::string& text);

struct TableComparison {
  bool equal = true;
  std::string first_difference;
};

// Cell-wise comparison: numbers within |a - b| <= atol + rtol |b|, text exact; nan == nan.
TableComparison compare_tables(const ResultTable& stored, const ResultTable& fresh, double rtol,
                               double atol);

}  // namespace neontrap::cli
