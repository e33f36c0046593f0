#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "neontrap/bound_states.hpp"
#include "neontrap/constants.hpp"
#include "neontrap/growth_estimates.hpp"
#include "neontrap/lateral_trap.hpp"
#include "neontrap/layered_dielectric.hpp"

namespace neontrap::cli {

struct PotentialZSection {
  std::vector<double> L{0.0, 2.0, 5.0, 10.0, 20.0, kInfiniteThickness};
  double e_ex = 0.0;
  double z_step = 0.05;  // nm
};

struct GroundSweepSection {
  std::vector<double> L{3.0, 5.0, 10.0, 20.0, 50.0, kInfiniteThickness};
  std::vector<double> e_ex{-1e6, 0.0, 1e6};
};

enum class ProfileKind { Pillar, Quadratic };

struct LateralSection {
  ProfileKind profile = ProfileKind::Pillar;
  double L0 = 10.0;
  std::vector<double> delta_L{0.5};
  std::vector<double> R{110.0};
  std::vector<double> b{2.0};
  std::vector<double> beta0{1e-5};
  double e_ex = 0.0;
  int alpha_max = 1;
  std::size_t table_points = 400;
};

struct FieldSweepSection {
  double L0 = 10.0;
  double delta_L = 0.5;
  double R = 110.0;
  double b = 2.0;
  std::vector<double> e_ex{-1e6, -5e5, -2.5e5, 0.0, 2.5e5, 5e5, 1e6};
};

struct GrowthSection {
  std::vector<double> r_c{10.0, -10.0};
  std::vector<double> t{1e-5, 4e-5};
  std::vector<double> delta_h{25.0};
};

struct RunConfig {
  // [stack]
  bool superconducting = true;
  double eps_substrate = kDefaultConstants.eps_si_default;
  double eps_neon = kDefaultConstants.eps_neon_default;
  // [constants]
  PhysicalConstants constants{};
  // [grid]
  std::size_t n_points = 8192;
  double z_max = 40.0;
  std::size_t rho_points = 16384;
  double rho_max = 0.0;  // 0 = profile default
  std::size_t knots = 60;
  // [material]
  NeonMaterialData material{};
  // [output]; not part of the effective-config hash
  std::string format = "csv";
  std::size_t threads = 0;  // 0 = hardware concurrency

  PotentialZSection potential_z{};
  GroundSweepSection ground_sweep{};
  LateralSection lateral{};
  FieldSweepSection field_sweep{};
  GrowthSection growth{};

  DielectricStack stack(double thickness) const;
  PerpendicularOptions perpendicular_options() const;
  EnergyCurveOptions curve_options(std::size_t workers) const;
};

// Strict INI parse: unknown sections or keys, missing units, malformed or out-of-range
// values throw ConfigError naming the offending key (or line for syntax errors).
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Canonical, fully resolved echo of every physics-relevant setting (all sections except
// [output]). Identical configs produce identical text.
std::string effective_config(const RunConfig& config);

// SHA-256 of effective_config, lowercase hex.
std::string config_hash(const RunConfig& config);

}  // namespace neontrap::cli
