#include "neontrap/cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "neontrap/errors.hpp"
#include "neontrap/growth_estimates.hpp"
#include "neontrap/parallel.hpp"

namespace neontrap::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ResultTable make_table(const std::string& command, const std::string& block, const RunConfig& config,
                       std::vector<Column> columns) {
  ResultTable t;
  t.block = block;
  t.columns = std::move(columns);
  t.metadata = {{"tool", kToolName},
                {"version", kToolVersion},
                {"command", command},
                {"block", block},
                {"config_hash", config_hash(config)}};
  return t;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string thickness_label(double L) {
  if (std::isinf(L)) return "L_inf";
  return "L_" + format_number(L) + "nm";
}

}  // namespace

CommandOutput run_potential_z(const RunConfig& config, std::size_t workers) {
  const auto& sec = config.potential_z;
  const auto thicknesses = sorted_unique(sec.L);
  const double zc = config.constants.cutoff_zc;

  std::vector<double> zs{zc};
  const auto first = static_cast<long>(std::floor(zc / sec.z_step)) + 1;
  for (long k = first; static_cast<double>(k) * sec.z_step <= config.z_max + 1e-12; ++k) {
    zs.push_back(static_cast<double>(k) * sec.z_step);
  }

  CommandOutput out;
  out.tables.resize(thicknesses.size());
  parallel_for(thicknesses.size(), workers, [&](std::size_t j) {
    const double L = thicknesses[j];
    const DielectricStack stack = config.stack(L);
    ResultTable t = make_table("potential-z", thickness_label(L), config,
                               {{"z", "nm"}, {"V_perp", "meV"}, {"V_ex", "meV"}, {"V_total", "meV"}});
    t.metadata.emplace_back("L_nm", format_number(L));
    t.metadata.emplace_back("E_ex_V_per_m", format_number(sec.e_ex));
    for (double z : zs) {
      const double v_perp = perpendicular_potential(stack, z, config.constants);
      const double v_ex = external_potential(stack, {sec.e_ex}, z);
      t.add_row({z, v_perp, v_ex, v_perp + v_ex});
    }
    out.tables[j] = std::move(t);
  });
  return out;
}

CommandOutput run_ground_sweep(const RunConfig& config, std::size_t workers) {
  const auto thicknesses = sorted_unique(config.ground_sweep.L);
  const auto fields = sorted_unique(config.ground_sweep.e_ex);
  struct Point {
    double L = 0.0, e_ex = 0.0, w = kNaN, h_e = kNaN, gap = kNaN;
    bool bound = false;
    std::string failure;
  };
  std::vector<Point> points;
  for (double L : thicknesses) {
    for (double e : fields) {
      Point p;
      p.L = L;
      p.e_ex = e;
      points.push_back(std::move(p));
    }
  }

  const auto options = config.perpendicular_options();
  parallel_for(points.size(), workers, [&](std::size_t i) {
    Point& p = points[i];
    try {
      const auto s = solve_perpendicular(config.stack(p.L), {p.e_ex}, 2, options, config.constants);
      p.w = s.energies[0];
      p.h_e = mean_height(s);
      p.gap = perpendicular_gap(s);
      p.bound = s.all_converged();
    } catch (const UnboundError& e) {
      p.failure = e.what();
    }
  });

  CommandOutput out;
  ResultTable t = make_table("ground-sweep", "ground", config,
                             {{"L", "nm"}, {"E_ex", "V/m"}, {"W_G", "meV"}, {"h_e", "nm"}, {"gap", "meV"}, {"bound", "-"}});
  for (const auto& p : points) {
    t.add_row({p.L, p.e_ex, p.w, p.h_e, p.gap, p.bound ? 1.0 : 0.0});
    if (!p.bound) {
      out.has_flagged_rows = true;
      out.warnings.push_back(fmt::format("unbound at L = {} nm, E_ex = {} V/m{}", format_number(p.L),
                                         format_number(p.e_ex), p.failure.empty() ? "" : ": " + p.failure));
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

CommandOutput run_lateral(const RunConfig& config, std::size_t workers) {
  const auto& sec = config.lateral;
  const DielectricStack stack = config.stack(sec.L0);

  std::vector<ThicknessProfile> profiles;
  if (sec.profile == ProfileKind::Pillar) {
    for (double dL : sorted_unique(sec.delta_L)) {
      for (double R : sorted_unique(sec.R)) {
        for (double b : sorted_unique(sec.b)) profiles.emplace_back(PillarProfile{sec.L0, dL, R, b});
      }
    }
  } else {
    for (double beta0 : sorted_unique(sec.beta0)) profiles.emplace_back(QuadraticProfile{sec.L0, beta0});
  }

  auto rho_max_for = [&](const ThicknessProfile& p) {
    return config.rho_max > 0.0 ? config.rho_max : default_rho_max(p);
  };
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& p : profiles) {
    validate(p);
    const auto [a, b] = curve_range_for(p, rho_max_for(p));
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }

  CommandOutput out;
  const EnergyCurve curve = EnergyCurve::build(stack, {sec.e_ex}, lo, hi, config.curve_options(workers));

  const bool pillar = sec.profile == ProfileKind::Pillar;
  std::vector<Column> geometry =
      pillar ? std::vector<Column>{{"delta_L", "nm"}, {"R", "nm"}, {"b", "nm"}} : std::vector<Column>{{"beta0", "nm^-2"}};
  auto potential_cols = geometry;
  potential_cols.insert(potential_cols.end(), {{"rho", "nm"}, {"L_rho", "nm"}, {"V_par", "meV"}});
  auto spectrum_cols = geometry;
  spectrum_cols.insert(spectrum_cols.end(), {{"alpha", "-"},
                                             {"U_alpha", "ueV"},
                                             {"delta_U", "ueV"},
                                             {"rho_e", "nm"},
                                             {"rho_e_flat", "nm"},
                                             {"depth", "meV"},
                                             {"bound", "-"}});
  ResultTable potential = make_table("lateral", "potential", config, potential_cols);
  ResultTable spectrum = make_table("lateral", "spectrum", config, spectrum_cols);
  for (auto* t : {&potential, &spectrum}) {
    t->metadata.emplace_back("L0_nm", format_number(sec.L0));
    t->metadata.emplace_back("E_ex_V_per_m", format_number(sec.e_ex));
    t->metadata.emplace_back("curve_validation_error_meV", format_number(curve.validation_error()));
  }

  std::vector<LateralSpectrum> spectra(profiles.size());
  parallel_for(profiles.size(), workers, [&](std::size_t i) {
    RadialOptions ro;
    ro.n_points = config.rho_points;
    ro.rho_max = rho_max_for(profiles[i]);
    ro.alpha_max = sec.alpha_max;
    ro.table_points = sec.table_points;
    spectra[i] = lateral_spectrum(curve, profiles[i], ro, config.constants);
  });

  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& profile = profiles[i];
    const auto& s = spectra[i];
    std::vector<Cell> geo;
    double depth = kNaN;
    if (const auto* p = std::get_if<PillarProfile>(&profile)) {
      geo = {p->delta_L, p->R, p->b};
      depth = trap_depth(curve, *p);
      if (auto warning = lta_validity_warning(stack, {sec.e_ex}, *p, config.perpendicular_options(),
                                              config.constants)) {
        out.warnings.push_back(*warning);
      }
    } else {
      geo = {std::get<QuadraticProfile>(profile).beta0};
    }
    for (const auto& [rho, v] : s.potential_table) {
      auto row = geo;
      row.insert(row.end(), {rho, thickness_at(profile, rho), v});
      potential.add_row(std::move(row));
    }
    for (std::size_t alpha = 0; alpha < s.U_meV.size(); ++alpha) {
      auto row = geo;
      row.insert(row.end(), {static_cast<double>(alpha), s.U_ueV(alpha), s.delta_U_ueV, s.rho_e,
                             s.rho_e_flat, depth, s.bound ? 1.0 : 0.0});
      spectrum.add_row(std::move(row));
    }
    if (!s.bound) {
      out.has_flagged_rows = true;
      out.warnings.push_back("lateral spectrum not bound for geometry #" + std::to_string(i));
    }
  }
  out.tables.push_back(std::move(potential));
  out.tables.push_back(std::move(spectrum));
  return out;
}

CommandOutput run_field_sweep(const RunConfig& config, std::size_t workers) {
  const auto& sec = config.field_sweep;
  const PillarProfile profile{sec.L0, sec.delta_L, sec.R, sec.b};
  const auto fields = sorted_unique(sec.e_ex);
  RadialOptions ro;
  ro.n_points = config.rho_points;
  ro.rho_max = config.rho_max;
  const FieldResponse response =
      field_response(config.stack(sec.L0), profile, fields, config.curve_options(workers), ro);

  CommandOutput out;
  ResultTable table = make_table("field-sweep", "response", config,
                                 {{"E_ex", "V/m"}, {"delta_U", "ueV"}, {"rho_e", "nm"}, {"depth", "meV"}, {"bound", "-"}});
  std::vector<double> fit_fields, fit_values;
  for (const auto& row : response.rows) {
    table.add_row({row.e_ex, row.delta_U_ueV, row.rho_e, row.depth_meV, row.bound ? 1.0 : 0.0});
    if (row.bound) {
      fit_fields.push_back(row.e_ex);
      fit_values.push_back(row.delta_U_ueV);
    } else {
      out.has_flagged_rows = true;
      out.warnings.push_back("unbound at E_ex = " + format_number(row.e_ex) + " V/m");
    }
  }
  table.metadata.emplace_back("slope_negative_ueV_per_V_per_m", format_number(response.slope_negative));
  table.metadata.emplace_back("slope_positive_ueV_per_V_per_m", format_number(response.slope_positive));
  table.metadata.emplace_back("asymmetry_ratio", format_number(response.asymmetry_ratio));

  ResultTable fit_table = make_table("field-sweep", "harmonic_fit", config,
                                     {{"hbar_omega0", "ueV"},
                                      {"beta1", "meV/nm^2/(V/m)"},
                                      {"rms_residual", "ueV"},
                                      {"slope_negative", "ueV/(V/m)"},
                                      {"slope_positive", "ueV/(V/m)"},
                                      {"asymmetry_ratio", "-"}});
  if (fit_fields.size() >= 2) {
    const HarmonicFit fit = fit_harmonic_field_model(fit_fields, fit_values, config.constants.hbar2_over_2me);
    fit_table.add_row({fit.model.hbar_omega0_ueV, fit.model.beta1, fit.rms_residual_ueV, response.slope_negative,
                       response.slope_positive, response.asymmetry_ratio});
  } else {
    fit_table.add_row({kNaN, kNaN, kNaN, response.slope_negative, response.slope_positive, response.asymmetry_ratio});
  }
  out.tables.push_back(std::move(table));
  out.tables.push_back(std::move(fit_table));
  return out;
}

CommandOutput run_growth(const RunConfig& config, std::size_t /*workers*/) {
  const auto& m = config.material;
  const auto& sec = config.growth;
  CommandOutput out;
  ResultTable t = make_table("growth", "growth", config, {{"quantity", "-"}, {"value", "-"}, {"unit", "-"}});
  t.add_row({std::string("gibbs_thomson_coefficient"), gibbs_thomson_coefficient(m), std::string("K*nm")});
  for (double r : sec.r_c) {
    t.add_row({"gibbs_thomson_shift(r_c=" + format_number(r) + "nm)", gibbs_thomson_shift(m, r), std::string("K")});
  }
  for (double time : sec.t) {
    t.add_row({"diffusion_length(t=" + format_number(time) + "s)", diffusion_length(m, time), std::string("nm")});
  }
  for (double h : sec.delta_h) {
    t.add_row({"gravity_potential_difference(delta_h=" + format_number(h) + "nm)",
               gravity_potential_difference(m, h), std::string("meV")});
  }
  out.tables.push_back(std::move(t));
  return out;
}

std::vector<std::string> command_names() {
  return {"potential-z", "ground-sweep", "lateral", "field-sweep", "growth"};
}

CommandOutput run_command(const std::string& name, const RunConfig& config, std::size_t workers) {
  if (name == "potential-z") return run_potential_z(config, workers);
  if (name == "ground-sweep") return run_ground_sweep(config, workers);
  if (name == "lateral") return run_lateral(config, workers);
  if (name == "field-sweep") return run_field_sweep(config, workers);
  if (name == "growth") return run_growth(config, workers);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace neontrap::cli
