#include "neontrap/cli/result_table.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <limits>
#include "json.hpp"
#include <sstream>
#include <stdexcept>

#include "neontrap/errors.hpp"

namespace neontrap::cli {

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  return std::get<std::string>(cell);
}

Cell parse_cell(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return value;
  return text;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("ResultTable '" + block + "': row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

const std::string* ResultTable::find_metadata(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.9g}", value);
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (const auto& [key, value] : table.metadata) out += "# " + key + ": " + value + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += table.columns[c].name + "[" + table.columns[c].unit + "]";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += cell_text(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.metadata) doc["metadata"][key] = value;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& col : table.columns) doc["columns"].push_back({{"name", col.name}, {"unit", col.unit}});
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto jrow = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell)) {
        // Round-trip through the CSV text so both formats carry identical digits.
        if (std::isfinite(*d)) {
          jrow.push_back(std::get<double>(parse_cell(format_number(*d))));
        } else {
          jrow.push_back(format_number(*d));
        }
      } else {
        jrow.push_back(std::get<std::string>(cell));
      }
    }
    doc["rows"].push_back(std::move(jrow));
  }
  return doc.dump(2) + "\n";
}

ResultTable parse_csv(const std::string& text) {
  ResultTable table;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ", 2);
      if (colon == std::string::npos) throw NumericalError("malformed metadata line: " + line);
      table.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (!header_seen) {
      for (const auto& field : split_commas(line)) {
        const auto open = field.rfind('[');
        if (open == std::string::npos || field.back() != ']') {
          throw NumericalError("malformed header field: " + field);
        }
        table.columns.push_back({field.substr(0, open), field.substr(open + 1, field.size() - open - 2)});
      }
      header_seen = true;
      continue;
    }
    std::vector<Cell> row;
    for (const auto& field : split_commas(line)) row.push_back(parse_cell(field));
    table.add_row(std::move(row));
  }
  if (const auto* block = table.find_metadata("block")) table.block = *block;
  return table;
}

ResultTable parse_json(const std::string& text) {
  ResultTable table;
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
    for (const auto& [key, value] : doc.at("metadata").items()) {
      table.metadata.emplace_back(key, value.get<std::string>());
    }
    for (const auto& col : doc.at("columns")) {
      table.columns.push_back({col.at("name").get<std::string>(), col.at("unit").get<std::string>()});
    }
    for (const auto& jrow : doc.at("rows")) {
      std::vector<Cell> row;
      for (const auto& cell : jrow) {
        if (cell.is_number()) {
          row.emplace_back(cell.get<double>());
        } else {
          row.push_back(parse_cell(cell.get<std::string>()));
        }
      }
      table.add_row(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw NumericalError(std::string("malformed result JSON: ") + e.what());
  }
  if (const auto* block = table.find_metadata("block")) table.block = *block;
  return table;
}

TableComparison compare_tables(const ResultTable& stored, const ResultTable& fresh, double rtol,
                               double atol) {
  TableComparison result;
  auto fail = [&](std::string why) {
    result.equal = false;
    result.first_difference = std::move(why);
    return result;
  };
  if (stored.columns.size() != fresh.columns.size()) return fail("column count differs");
  for (std::size_t c = 0; c < stored.columns.size(); ++c) {
    if (stored.columns[c].name != fresh.columns[c].name || stored.columns[c].unit != fresh.columns[c].unit) {
      return fail("column " + std::to_string(c) + " differs");
    }
  }
  if (stored.rows.size() != fresh.rows.size()) return fail("row count differs");
  for (std::size_t r = 0; r < stored.rows.size(); ++r) {
    for (std::size_t c = 0; c < stored.columns.size(); ++c) {
      const Cell& a = stored.rows[r][c];
      const Cell& b = fresh.rows[r][c];
      const auto* da = std::get_if<double>(&a);
      const auto* db = std::get_if<double>(&b);
      bool same = false;
      if (da && db) {
        same = (std::isnan(*da) && std::isnan(*db)) || *da == *db ||
               std::abs(*da - *db) <= atol + rtol * std::abs(*db);
      } else {
        same = cell_text(a) == cell_text(b);
      }
      if (!same) {
        return fail(fmt::format("row {} column {}: stored {} vs fresh {}", r, stored.columns[c].name,
                                cell_text(a), cell_text(b)));
      }
    }
  }
  return result;
}

}  // namespace neontrap::cli
