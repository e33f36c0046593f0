#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace neontrap::cli {

// Physical dimension of a configuration value. Each has one working unit that values are
// converted into on parse and printed in on emit.
enum class Dimension {
  Dimensionless,
  Length,        // nm
  InverseArea,   // nm^-2
  Energy,        // meV
  EnergyLength,  // meV*nm
  EnergyArea,    // meV*nm^2
  Field,         // V/m
  Time,          // s
  Temperature,   // K
  SurfaceEnergy, // J/m^2
  MolarVolume,   // m^3/mol
  MolarEnergy,   // J/mol
  Mass,          // u
  Diffusivity,   // mm^2/s
};

std::string_view working_unit(Dimension dim);

// Multiplier that takes a value in `unit` to the working unit of `dim`. Throws ConfigError
// for units of another dimension or unknown symbols.
double unit_factor(Dimension dim, std::string_view unit);

// "<number> <unit>"; the unit is mandatory unless dim is Dimensionless (then absent or "1").
// "inf" is accepted as a number.
double parse_quantity(std::string_view text, Dimension dim);

// "<v1>, <v2>, ... <unit>": each item may carry its own unit; bare items take the
// unit of the last item.
std::vector<double> parse_quantity_list(std::string_view text, Dimension dim);

// Lossless text form in the working unit (17 significant digits).
std::string format_quantity(double value, Dimension dim);
std::string format_quantity_list(const std::vector<double>& values, Dimension dim);

}  // namespace neontrap::cli
