#include "neontrap/cli/quantity.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "neontrap/errors.hpp"

namespace neontrap::cli {

namespace {

struct UnitEntry {
  Dimension dim;
  std::string_view symbol;
  double factor;
};

constexpr std::array kUnits{
    UnitEntry{Dimension::Dimensionless, "1", 1.0},
    UnitEntry{Dimension::Length, "nm", 1.0},
    UnitEntry{Dimension::Length, "A", 0.1},
    UnitEntry{Dimension::Length, "um", 1e3},
    UnitEntry{Dimension::Length, "mm", 1e6},
    UnitEntry{Dimension::Length, "m", 1e9},
    UnitEntry{Dimension::InverseArea, "nm^-2", 1.0},
    UnitEntry{Dimension::InverseArea, "um^-2", 1e-6},
    UnitEntry{Dimension::Energy, "meV", 1.0},
    UnitEntry{Dimension::Energy, "ueV", 1e-3},
    UnitEntry{Dimension::Energy, "eV", 1e3},
    UnitEntry{Dimension::EnergyLength, "meV*nm", 1.0},
    UnitEntry{Dimension::EnergyLength, "eV*nm", 1e3},
    UnitEntry{Dimension::EnergyArea, "meV*nm^2", 1.0},
    UnitEntry{Dimension::EnergyArea, "eV*nm^2", 1e3},
    UnitEntry{Dimension::Field, "V/m", 1.0},
    UnitEntry{Dimension::Field, "kV/m", 1e3},
    UnitEntry{Dimension::Field, "MV/m", 1e6},
    UnitEntry{Dimension::Field, "V/um", 1e6},
    UnitEntry{Dimension::Field, "V/nm", 1e9},
    UnitEntry{Dimension::Time, "s", 1.0},
    UnitEntry{Dimension::Time, "ms", 1e-3},
    UnitEntry{Dimension::Time, "us", 1e-6},
    UnitEntry{Dimension::Time, "ns", 1e-9},
    UnitEntry{Dimension::Temperature, "K", 1.0},
    UnitEntry{Dimension::Temperature, "mK", 1e-3},
    UnitEntry{Dimension::SurfaceEnergy, "J/m^2", 1.0},
    UnitEntry{Dimension::SurfaceEnergy, "mJ/m^2", 1e-3},
    UnitEntry{Dimension::MolarVolume, "m^3/mol", 1.0},
    UnitEntry{Dimension::MolarVolume, "cm^3/mol", 1e-6},
    UnitEntry{Dimension::MolarEnergy, "J/mol", 1.0},
    UnitEntry{Dimension::MolarEnergy, "kJ/mol", 1e3},
    UnitEntry{Dimension::Mass, "u", 1.0},
    UnitEntry{Dimension::Diffusivity, "mm^2/s", 1.0},
    UnitEntry{Dimension::Diffusivity, "m^2/s", 1e6},
    UnitEntry{Dimension::Diffusivity, "nm^2/s", 1e-12},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::string_view context) {
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || std::isnan(value)) {
    throw ConfigError("not a number: '" + std::string(token) + "' in '" + std::string(context) + "'");
  }
  return value;
}

// Splits "12.5 nm" into number and (possibly empty) unit.
std::pair<std::string_view, std::string_view> split_item(std::string_view item) {
  item = trim(item);
  const auto space = item.find_first_of(" \t");
  if (space == std::string_view::npos) return {item, {}};
  return {item.substr(0, space), trim(item.substr(space))};
}

double apply_unit(double value, Dimension dim, std::string_view unit, std::string_view context) {
  if (std::isinf(value) && dim != Dimension::Length) {
    throw ConfigError("infinite value not allowed in '" + std::string(context) + "'");
  }
  if (unit.empty()) {
    if (dim == Dimension::Dimensionless) return value;
    throw ConfigError("missing unit in '" + std::string(context) + "' (expected e.g. " +
                      std::string(working_unit(dim)) + ")");
  }
  return value * unit_factor(dim, unit);
}

}  // namespace

std::string_view working_unit(Dimension dim) {
  for (const auto& u : kUnits) {
    if (u.dim == dim && u.factor == 1.0) return u.symbol;
  }
  return "1";
}

double unit_factor(Dimension dim, std::string_view unit) {
  for (const auto& u : kUnits) {
    if (u.symbol == unit) {
      if (u.dim != dim) {
        throw ConfigError("unit '" + std::string(unit) + "' has the wrong dimension (expected " +
                          std::string(working_unit(dim)) + ")");
      }
      return u.factor;
    }
  }
  throw ConfigError("unknown unit '" + std::string(unit) + "'");
}

double parse_quantity(std::string_view text, Dimension dim) {
  const auto [number, unit] = split_item(text);
  if (number.empty()) throw ConfigError("empty value");
  return apply_unit(parse_number(number, text), dim, unit, text);
}

std::vector<double> parse_quantity_list(std::string_view text, Dimension dim) {
  std::vector<std::pair<std::string_view, std::string_view>> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                           : comma - start);
    const auto item = split_item(piece);
    if (item.first.empty()) throw ConfigError("empty item in list '" + std::string(text) + "'");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  const std::string_view trailing_unit = items.back().second;
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& [number, unit] : items) {
    out.push_back(apply_unit(parse_number(number, text), dim, unit.empty() ? trailing_unit : unit, text));
  }
  return out;
}

std::string format_quantity(double value, Dimension dim) {
  std::string number = std::isinf(value) ? (value > 0 ? "inf" : "-inf") : fmt::format("{:.17g}", value);
  if (dim == Dimension::Dimensionless) return number;
  return number + " " + std::string(working_unit(dim));
}

std::string format_quantity_list(const std::vector<double>& values, Dimension dim) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_quantity(values[i], Dimension::Dimensionless);
  }
  if (dim != Dimension::Dimensionless) out += " " + std::string(working_unit(dim));
  return out;
}

}  // namespace neontrap::cli
