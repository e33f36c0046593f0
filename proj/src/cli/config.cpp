#include "neontrap/cli/config.hpp"

#include <fmt/format.h>
#include <openssl/sha.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "neontrap/cli/quantity.hpp"
#include "neontrap/errors.hpp"

namespace neontrap::cli {

namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

std::size_t parse_count(const std::string& text, std::size_t lo, std::size_t hi) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("not a non-negative integer: '" + text + "'");
  }
  if (value < lo || value > hi) {
    throw ConfigError("value " + text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return value;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_positive(const std::vector<double>& values, const std::string& what) {
  for (double v : values) require(v > 0.0, what + " must be positive");
}

const Schema& schema() {
  static const Schema s = {
      {"stack",
       {{"substrate",
         [](RunConfig& c, const std::string& v) {
           if (v == "superconductor") {
             c.superconducting = true;
           } else if (v == "dielectric") {
             c.superconducting = false;
           } else {
             throw ConfigError("substrate must be 'superconductor' or 'dielectric'");
           }
         }},
        {"eps_substrate",
         [](RunConfig& c, const std::string& v) {
           c.eps_substrate = parse_quantity(v, Dimension::Dimensionless);
           require(c.eps_substrate >= 1.0, "eps_substrate must be >= 1");
         }},
        {"eps_neon",
         [](RunConfig& c, const std::string& v) {
           c.eps_neon = parse_quantity(v, Dimension::Dimensionless);
           require(c.eps_neon > 1.0, "eps_neon must be > 1");
         }}}},
      {"constants",
       {{"hbar2_over_2me",
         [](RunConfig& c, const std::string& v) {
           c.constants.hbar2_over_2me = parse_quantity(v, Dimension::EnergyArea);
           require(c.constants.hbar2_over_2me > 0.0, "hbar2_over_2me must be positive");
         }},
        {"image_prefactor",
         [](RunConfig& c, const std::string& v) {
           c.constants.image_prefactor = parse_quantity(v, Dimension::EnergyLength);
           require(c.constants.image_prefactor > 0.0, "image_prefactor must be positive");
         }},
        {"barrier_height",
         [](RunConfig& c, const std::string& v) {
           c.constants.barrier_height = parse_quantity(v, Dimension::Energy);
           require(c.constants.barrier_height > 0.0, "barrier_height must be positive");
         }},
        {"cutoff",
         [](RunConfig& c, const std::string& v) {
           c.constants.cutoff_zc = parse_quantity(v, Dimension::Length);
           require(c.constants.cutoff_zc > 0.0, "cutoff must be positive");
         }}}},
      {"grid",
       {{"n_points", [](RunConfig& c, const std::string& v) { c.n_points = parse_count(v, 500, 1u << 22); }},
        {"z_max",
         [](RunConfig& c, const std::string& v) {
           c.z_max = parse_quantity(v, Dimension::Length);
           require(c.z_max > 1.0 && std::isfinite(c.z_max), "z_max must be finite and > 1 nm");
         }},
        {"rho_points", [](RunConfig& c, const std::string& v) { c.rho_points = parse_count(v, 100, 1u << 22); }},
        {"rho_max",
         [](RunConfig& c, const std::string& v) {
           c.rho_max = parse_quantity(v, Dimension::Length);
           require(c.rho_max > 0.0 && std::isfinite(c.rho_max), "rho_max must be finite and positive");
         }},
        {"knots", [](RunConfig& c, const std::string& v) { c.knots = parse_count(v, 20, 2000); }}}},
      {"material",
       {{"gamma_sl", [](RunConfig& c, const std::string& v) { c.material.gamma_sl = parse_quantity(v, Dimension::SurfaceEnergy); }},
        {"molar_volume", [](RunConfig& c, const std::string& v) { c.material.molar_volume = parse_quantity(v, Dimension::MolarVolume); }},
        {"enthalpy_fusion", [](RunConfig& c, const std::string& v) { c.material.enthalpy_fusion = parse_quantity(v, Dimension::MolarEnergy); }},
        {"t_bulk", [](RunConfig& c, const std::string& v) { c.material.t_bulk = parse_quantity(v, Dimension::Temperature); }},
        {"atomic_mass", [](RunConfig& c, const std::string& v) { c.material.atomic_mass = parse_quantity(v, Dimension::Mass); }},
        {"diffusion_coefficient", [](RunConfig& c, const std::string& v) { c.material.diffusion_coefficient = parse_quantity(v, Dimension::Diffusivity); }}}},
      {"output",
       {{"format",
         [](RunConfig& c, const std::string& v) {
           require(v == "csv" || v == "json", "format must be 'csv' or 'json'");
           c.format = v;
         }},
        {"threads", [](RunConfig& c, const std::string& v) { c.threads = parse_count(v, 1, 1024); }}}},
      {"potential_z",
       {{"L",
         [](RunConfig& c, const std::string& v) {
           c.potential_z.L = parse_quantity_list(v, Dimension::Length);
           for (double L : c.potential_z.L) require(L >= 0.0, "potential_z.L must be >= 0");
         }},
        {"E_ex", [](RunConfig& c, const std::string& v) { c.potential_z.e_ex = parse_quantity(v, Dimension::Field); }},
        {"z_step",
         [](RunConfig& c, const std::string& v) {
           c.potential_z.z_step = parse_quantity(v, Dimension::Length);
           require(c.potential_z.z_step > 1e-4, "z_step must exceed 1e-4 nm");
         }}}},
      {"ground_sweep",
       {{"L",
         [](RunConfig& c, const std::string& v) {
           c.ground_sweep.L = parse_quantity_list(v, Dimension::Length);
           require_positive(c.ground_sweep.L, "ground_sweep.L");
         }},
        {"E_ex", [](RunConfig& c, const std::string& v) { c.ground_sweep.e_ex = parse_quantity_list(v, Dimension::Field); }}}},
      {"lateral",
       {{"profile",
         [](RunConfig& c, const std::string& v) {
           if (v == "pillar") {
             c.lateral.profile = ProfileKind::Pillar;
           } else if (v == "quadratic") {
             c.lateral.profile = ProfileKind::Quadratic;
           } else {
             throw ConfigError("profile must be 'pillar' or 'quadratic'");
           }
         }},
        {"L0", Setter{}},
        {"delta_L",
         [](RunConfig& c, const std::string& v) {
           c.lateral.delta_L = parse_quantity_list(v, Dimension::Length);
           require_positive(c.lateral.delta_L, "lateral.delta_L");
         }},
        {"R",
         [](RunConfig& c, const std::string& v) {
           c.lateral.R = parse_quantity_list(v, Dimension::Length);
           require_positive(c.lateral.R, "lateral.R");
         }},
        {"b",
         [](RunConfig& c, const std::string& v) {
           c.lateral.b = parse_quantity_list(v, Dimension::Length);
           require_positive(c.lateral.b, "lateral.b");
         }},
        {"beta0",
         [](RunConfig& c, const std::string& v) {
           c.lateral.beta0 = parse_quantity_list(v, Dimension::InverseArea);
           require_positive(c.lateral.beta0, "lateral.beta0");
         }},
        {"E_ex", [](RunConfig& c, const std::string& v) { c.lateral.e_ex = parse_quantity(v, Dimension::Field); }},
        {"alpha_max", [](RunConfig& c, const std::string& v) { c.lateral.alpha_max = static_cast<int>(parse_count(v, 1, 20)); }},
        {"table_points", [](RunConfig& c, const std::string& v) { c.lateral.table_points = parse_count(v, 2, 100000); }}}},
      {"field_sweep",
       {{"L0", Setter{}},
        {"delta_L", [](RunConfig& c, const std::string& v) { c.field_sweep.delta_L = parse_quantity(v, Dimension::Length); }},
        {"R", [](RunConfig& c, const std::string& v) { c.field_sweep.R = parse_quantity(v, Dimension::Length); }},
        {"b", [](RunConfig& c, const std::string& v) { c.field_sweep.b = parse_quantity(v, Dimension::Length); }},
        {"E_ex", [](RunConfig& c, const std::string& v) { c.field_sweep.e_ex = parse_quantity_list(v, Dimension::Field); }}}},
      {"growth",
       {{"r_c",
         [](RunConfig& c, const std::string& v) {
           c.growth.r_c = parse_quantity_list(v, Dimension::Length);
           for (double r : c.growth.r_c) require(r != 0.0, "growth.r_c must be non-zero");
         }},
        {"t",
         [](RunConfig& c, const std::string& v) {
           c.growth.t = parse_quantity_list(v, Dimension::Time);
           for (double t : c.growth.t) require(t >= 0.0, "growth.t must be >= 0");
         }},
        {"delta_h",
         [](RunConfig& c, const std::string& v) {
           c.growth.delta_h = parse_quantity_list(v, Dimension::Length);
           for (double h : c.growth.delta_h) require(h >= 0.0, "growth.delta_h must be >= 0");
         }}}},
  };
  return s;
}

// The two L0 keys share a name across sections; resolve them here instead of via member pointers.
void set_value(RunConfig& config, const std::string& section, const std::string& key, const std::string& value) {
  if (key == "L0" && (section == "lateral" || section == "field_sweep")) {
    const double L0 = parse_quantity(value, Dimension::Length);
    require(L0 > 0.0 && L0 <= 200.0, "L0 must lie in (0, 200] nm");
    (section == "lateral" ? config.lateral.L0 : config.field_sweep.L0) = L0;
    return;
  }
  schema().at(section).at(key)(config, value);
}

void cross_validate(const RunConfig& c) {
  for (double dL : c.lateral.delta_L) require(dL < c.lateral.L0, "lateral.delta_L must be < L0");
  require(c.field_sweep.delta_L > 0.0 && c.field_sweep.delta_L < c.field_sweep.L0,
          "field_sweep.delta_L must lie in (0, L0)");
  require(c.field_sweep.R > 0.0 && c.field_sweep.b > 0.0, "field_sweep.R and b must be positive");
  if (c.lateral.profile == ProfileKind::Quadratic) {
    require(c.rho_max > 0.0, "quadratic profiles need grid.rho_max");
  }
  c.material.validate();
}

}  // namespace

DielectricStack RunConfig::stack(double thickness) const {
  if (superconducting) return DielectricStack::superconducting(thickness, eps_neon);
  return DielectricStack::dielectric(eps_substrate, thickness, eps_neon);
}

PerpendicularOptions RunConfig::perpendicular_options() const {
  PerpendicularOptions o;
  o.n_points = n_points;
  o.z_max = z_max;
  return o;
}

EnergyCurveOptions RunConfig::curve_options(std::size_t workers) const {
  EnergyCurveOptions o;
  o.n_knots = knots;
  o.workers = workers;
  o.perpendicular = perpendicular_options();
  o.constants = constants;
  return o;
}

RunConfig parse_config(std::istream& in) {
  // Comments ('#' or ';', whole-line or trailing) are stripped here, keeping line numbers;
  // the INI reader itself only knows whole-line ';' comments.
  std::ostringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto mark = line.find_first_of("#;");
    if (mark != std::string::npos) line.erase(mark);
    cleaned << line << '\n';
  }
  std::istringstream source(cleaned.str());

  pt::ptree tree;
  try {
    pt::read_ini(source, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig config;
  for (const auto& [section, entries] : tree) {
    const auto sec = schema().find(section);
    if (sec == schema().end()) {
      throw ConfigError("unknown config section [" + section + "]");
    }
    if (!entries.data().empty()) {
      throw ConfigError("top-level key '" + section + "' outside any section");
    }
    for (const auto& [key, node] : entries) {
      if (!sec->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      try {
        set_value(config, section, key, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
      }
    }
  }
  cross_validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string effective_config(const RunConfig& c) {
  std::ostringstream out;
  auto q = [](double v, Dimension d) { return format_quantity(v, d); };
  auto ql = [](const std::vector<double>& v, Dimension d) { return format_quantity_list(v, d); };

  out << "[stack]\n"
      << "substrate = " << (c.superconducting ? "superconductor" : "dielectric") << "\n"
      << "eps_substrate = " << q(c.eps_substrate, Dimension::Dimensionless) << "\n"
      << "eps_neon = " << q(c.eps_neon, Dimension::Dimensionless) << "\n\n";
  out << "[constants]\n"
      << "hbar2_over_2me = " << q(c.constants.hbar2_over_2me, Dimension::EnergyArea) << "\n"
      << "image_prefactor = " << q(c.constants.image_prefactor, Dimension::EnergyLength) << "\n"
      << "barrier_height = " << q(c.constants.barrier_height, Dimension::Energy) << "\n"
      << "cutoff = " << q(c.constants.cutoff_zc, Dimension::Length) << "\n\n";
  out << "[grid]\n"
      << "n_points = " << c.n_points << "\n"
      << "z_max = " << q(c.z_max, Dimension::Length) << "\n"
      << "rho_points = " << c.rho_points << "\n";
  if (c.rho_max > 0.0) out << "rho_max = " << q(c.rho_max, Dimension::Length) << "\n";
  out << "knots = " << c.knots << "\n\n";
  out << "[material]\n"
      << "gamma_sl = " << q(c.material.gamma_sl, Dimension::SurfaceEnergy) << "\n"
      << "molar_volume = " << q(c.material.molar_volume, Dimension::MolarVolume) << "\n"
      << "enthalpy_fusion = " << q(c.material.enthalpy_fusion, Dimension::MolarEnergy) << "\n"
      << "t_bulk = " << q(c.material.t_bulk, Dimension::Temperature) << "\n"
      << "atomic_mass = " << q(c.material.atomic_mass, Dimension::Mass) << "\n"
      << "diffusion_coefficient = " << q(c.material.diffusion_coefficient, Dimension::Diffusivity) << "\n\n";
  out << "[potential_z]\n"
      << "L = " << ql(c.potential_z.L, Dimension::Length) << "\n"
      << "E_ex = " << q(c.potential_z.e_ex, Dimension::Field) << "\n"
      << "z_step = " << q(c.potential_z.z_step, Dimension::Length) << "\n\n";
  out << "[ground_sweep]\n"
      << "L = " << ql(c.ground_sweep.L, Dimension::Length) << "\n"
      << "E_ex = " << ql(c.ground_sweep.e_ex, Dimension::Field) << "\n\n";
  out << "[lateral]\n"
      << "profile = " << (c.lateral.profile == ProfileKind::Pillar ? "pillar" : "quadratic") << "\n"
      << "L0 = " << q(c.lateral.L0, Dimension::Length) << "\n"
      << "delta_L = " << ql(c.lateral.delta_L, Dimension::Length) << "\n"
      << "R = " << ql(c.lateral.R, Dimension::Length) << "\n"
      << "b = " << ql(c.lateral.b, Dimension::Length) << "\n"
      << "beta0 = " << ql(c.lateral.beta0, Dimension::InverseArea) << "\n"
      << "E_ex = " << q(c.lateral.e_ex, Dimension::Field) << "\n"
      << "alpha_max = " << c.lateral.alpha_max << "\n"
      << "table_points = " << c.lateral.table_points << "\n\n";
  out << "[field_sweep]\n"
      << "L0 = " << q(c.field_sweep.L0, Dimension::Length) << "\n"
      << "delta_L = " << q(c.field_sweep.delta_L, Dimension::Length) << "\n"
      << "R = " << q(c.field_sweep.R, Dimension::Length) << "\n"
      << "b = " << q(c.field_sweep.b, Dimension::Length) << "\n"
      << "E_ex = " << ql(c.field_sweep.e_ex, Dimension::Field) << "\n\n";
  out << "[growth]\n"
      << "r_c = " << ql(c.growth.r_c, Dimension::Length) << "\n"
      << "t = " << ql(c.growth.t, Dimension::Time) << "\n"
      << "delta_h = " << ql(c.growth.delta_h, Dimension::Length) << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& config) {
  const std::string text = effective_config(config);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  hex.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char byte : digest) hex += fmt::format("{:02x}", byte);
  return hex;
}

}  // namespace neontrap::cli
