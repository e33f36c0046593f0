#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "neontrap/cli/config.hpp"
#include "neontrap/cli/result_table.hpp"

namespace neontrap::cli {

inline constexpr const char* kToolName = "neontrap";
inline constexpr const char* kToolVersion = "1.0.0";

struct CommandOutput {
  std::vector<ResultTable> tables;
  std::vector<std::string> warnings;
  bool has_flagged_rows = false;
};

// V_perp(z), V_ex(z) and their sum: one table per thickness.
CommandOutput run_potential_z(const RunConfig& config, std::size_t workers);
// W^G, h_e and the perpendicular gap over (L, E_ex), sorted by L then E_ex.
CommandOutput run_ground_sweep(const RunConfig& config, std::size_t workers);
// Local-thickness potential table and radial spectrum for each trap geometry.
CommandOutput run_lateral(const RunConfig& config, std::size_t workers);
// delta_U and rho_e against the applied field, plus the harmonic-model fit.
CommandOutput run_field_sweep(const RunConfig& config, std::size_t workers);
CommandOutput run_growth(const RunConfig& config, std::size_t workers);

// Dispatch by subcommand name; throws ConfigError for unknown names.
CommandOutput run_command(const std::string& name, const RunConfig& config, std::size_t workers);

std::vector<std::string> command_names();

}  // namespace neontrap::cli
