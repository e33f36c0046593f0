#include "neontrap/lateral_trap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "neontrap/errors.hpp"
#include "neontrap/parallel.hpp"
#include "neontrap/tridiagonal.hpp"

namespace neontrap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCurveMargin = 0.25;  // nm beyond the profile's thickness range
constexpr double kMinCurveThickness = 1.0;
constexpr double kMaxCurveThickness = 200.0;

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

void validate(const ThicknessProfile& profile) {
  if (const auto* p = std::get_if<PillarProfile>(&profile)) {
    if (!(p->L0 > 0.0) || !(p->delta_L > 0.0) || !(p->delta_L < p->L0)) {
      throw DomainError("pillar profile needs 0 < delta_L < L0");
    }
    if (!(p->R > 0.0) || !(p->b > 0.0)) {
      throw DomainError("pillar profile needs R > 0 and b > 0");
    }
  } else {
    const auto& q = std::get<QuadraticProfile>(profile);
    if (!(q.L0 > 0.0) || !(q.beta0 > 0.0)) {
      throw DomainError("quadratic profile needs L0 > 0 and beta0 > 0");
    }
  }
}

double thickness_at(const ThicknessProfile& profile, double rho) {
  if (const auto* p = std::get_if<PillarProfile>(&profile)) {
    const double x = rho - p->R;
    return p->L0 - 0.5 * p->delta_L * (1.0 - x / std::hypot(x, p->b));
  }
  const auto& q = std::get<QuadraticProfile>(profile);
  return q.L0 * (1.0 + q.beta0 * rho * rho);
}

double far_field_thickness(const ThicknessProfile& profile) {
  return std::visit([](const auto& p) { return p.L0; }, profile);
}

std::pair<double, double> thickness_range(const ThicknessProfile& profile, double rho_max) {
  // Both profiles are monotone in rho.
  const double a = thickness_at(profile, 0.0);
  const double b = thickness_at(profile, rho_max);
  return {std::min(a, b), std::max(a, b)};
}

double default_rho_max(const ThicknessProfile& profile) {
  if (const auto* p = std::get_if<PillarProfile>(&profile)) {
    return std::max(3.0 * p->R, p->R + 200.0);
  }
  throw DomainError("quadratic profiles need an explicit rho_max");
}

std::pair<double, double> curve_range_for(const ThicknessProfile& profile, double rho_max) {
  auto [lo, hi] = thickness_range(profile, rho_max);
  if (std::holds_alternative<PillarProfile>(profile)) {
    // The pillar profile only approaches its asymptotes; cover them exactly.
    const auto& p = std::get<PillarProfile>(profile);
    lo = std::min(lo, p.L0 - p.delta_L);
    hi = std::max(hi, p.L0);
  }
  lo = std::max(kMinCurveThickness, lo - kCurveMargin);
  hi = hi + kCurveMargin;
  if (hi > kMaxCurveThickness) {
    throw DomainError("profile thickness exceeds the tabulated range (200 nm); reduce rho_max");
  }
  return {lo, hi};
}

EnergyCurve EnergyCurve::build(const DielectricStack& stack_template, FieldSpec field, double L_lo,
                               double L_hi, const EnergyCurveOptions& options) {
  if (!(L_lo >= kMinCurveThickness) || !(L_hi <= kMaxCurveThickness) || !(L_hi > L_lo)) {
    throw DomainError("EnergyCurve: L range must lie within [1, 200] nm");
  }
  if (options.n_knots < 20) {
    throw DomainError("EnergyCurve: at least 20 knots required");
  }
  const std::vector<double> knots = log_spaced(L_lo, L_hi, options.n_knots);

  // Held-out points sit midway between evenly spread knot pairs.
  std::vector<double> held_out;
  const std::size_t n_held = std::min(options.held_out, options.n_knots - 1);
  for (std::size_t j = 0; j < n_held; ++j) {
    const std::size_t i = (j * (options.n_knots - 2)) / std::max<std::size_t>(n_held - 1, 1);
    held_out.push_back(0.5 * (knots[i] + knots[i + 1]));
  }

  std::vector<double> all = knots;
  all.insert(all.end(), held_out.begin(), held_out.end());
  std::vector<double> energies(all.size(), kNaN);
  std::vector<std::string> failures(all.size());
  parallel_for(all.size(), options.workers, [&](std::size_t i) {
    try {
      energies[i] = ground_state_energy(stack_template.with_thickness(all[i]), field,
                                        options.perpendicular, options.constants);
    } catch (const UnboundError& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!failures[i].empty()) {
      std::ostringstream msg;
      msg << "EnergyCurve: unbound knot at L = " << all[i] << " nm: " << failures[i];
      throw UnboundError(msg.str());
    }
  }

  CubicSpline spline(knots, std::vector<double>(energies.begin(), energies.begin() + knots.size()));
  double worst = 0.0;
  for (std::size_t j = 0; j < held_out.size(); ++j) {
    worst = std::max(worst, std::abs(spline(held_out[j]) - energies[knots.size() + j]));
  }
  if (worst > options.validation_budget) {
    std::ostringstream msg;
    msg << "EnergyCurve: spline misses held-out solves by " << worst << " meV (budget "
        << options.validation_budget << " meV); add knots";
    throw NumericalError(msg.str());
  }
  return EnergyCurve(std::move(spline), field, worst);
}

double EnergyCurve::operator()(double L) const {
  constexpr double kSlack = 1e-9;
  if (L < L_min() - kSlack || L > L_max() + kSlack) {
    std::ostringstream msg;
    msg << "EnergyCurve: L = " << L << " nm outside [" << L_min() << ", " << L_max() << "]";
    throw DomainError(msg.str());
  }
  return spline_(L);
}

double lta_potential(const EnergyCurve& curve, const ThicknessProfile& profile, double rho) {
  return curve(thickness_at(profile, rho)) - curve(far_field_thickness(profile));
}

double trap_depth(const EnergyCurve& curve, const PillarProfile& pillar) {
  return curve(pillar.L0) - curve(pillar.L0 - pillar.delta_L);
}

std::optional<std::string> lta_validity_warning(const DielectricStack& stack_template, FieldSpec field,
                                                const PillarProfile& pillar,
                                                const PerpendicularOptions& options,
                                                const PhysicalConstants& constants) {
  const auto solution =
      solve_perpendicular(stack_template.with_thickness(pillar.L0), field, 1, options, constants);
  const double h_e = mean_height(solution);
  if (pillar.b < h_e) {
    std::ostringstream msg;
    msg << "step width b = " << pillar.b << " nm is below the electron height h_e = " << h_e
        << " nm; the local-thickness approximation is outside its validity range";
    return msg.str();
  }
  return std::nullopt;
}

RadialState radial_lowest_state(const PotentialSampler& potential, int alpha, double rho_max,
                                std::size_t n_points, double hbar2_over_2m) {
  if (alpha < 0 || !(rho_max > 0.0) || n_points < 3) {
    throw DomainError("radial_lowest_state: need alpha >= 0, rho_max > 0, n_points >= 3");
  }
  // Wall at rho_max = (n + 1/2) h, i.e. the first ghost cell centre.
  const double h = rho_max / (static_cast<double>(n_points) + 0.5);
  const double k = hbar2_over_2m / (h * h);
  const double a2 = static_cast<double>(alpha) * static_cast<double>(alpha);

  RadialState state;
  state.rho.resize(n_points);
  SymTridiagonal t;
  t.diag.resize(n_points);
  t.offdiag.resize(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * h;
    state.rho[i] = r;
    const double v = potential(r);
    if (!std::isfinite(v)) {
      throw NumericalError("radial_lowest_state: non-finite potential at rho = " + std::to_string(r));
    }
    // (rho_{i+1/2} + rho_{i-1/2}) / rho_i = 2 on every cell, the axis face included.
    t.diag[i] = 2.0 * k + v + hbar2_over_2m * a2 / (r * r);
    if (i + 1 < n_points) {
      const double r_next = r + h;
      t.offdiag[i] = -k * (r + 0.5 * h) / std::sqrt(r * r_next);
    }
  }

  const EigenPairs pairs = lowest_eigenpairs(t, 1);
  state.energy = pairs.values.front();
  state.converged = pairs.converged.front();
  const auto& u = pairs.vectors.front();
  // sum u_i^2 = 1  <=>  sum R_i^2 rho_i h = 1
  state.radial.resize(n_points);
  const double sign = std::accumulate(u.begin(), u.end(), 0.0) < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    state.radial[i] = sign * u[i] / std::sqrt(state.rho[i] * h);
  }
  return state;
}

LateralSpectrum radial_spectrum(const PotentialSampler& potential, int alpha_max, double rho_max,
                                std::size_t n_points, double hbar2_over_2m, std::size_t table_points) {
  if (alpha_max < 1) {
    throw DomainError("radial_spectrum: alpha_max must be >= 1");
  }
  // Sample once; every alpha shares the same grid.
  const double h = rho_max / (static_cast<double>(n_points) + 0.5);
  std::vector<double> samples(n_points);
  for (std::size_t i = 0; i < n_points; ++i) samples[i] = potential((static_cast<double>(i) + 0.5) * h);
  auto tabulated = [&](double r) {
    const auto i = static_cast<std::size_t>(std::lround(r / h - 0.5));
    return samples[std::min(i, n_points - 1)];
  };

  LateralSpectrum out;
  out.rim_meV = potential(rho_max);
  bool converged = true;
  for (int alpha = 0; alpha <= alpha_max; ++alpha) {
    RadialState s = radial_lowest_state(tabulated, alpha, rho_max, n_points, hbar2_over_2m);
    converged = converged && s.converged;
    out.U_meV.push_back(s.energy);
    if (alpha == 1) {
      double weighted = 0.0, flat_num = 0.0, flat_den = 0.0;
      for (std::size_t i = 0; i < n_points; ++i) {
        const double r = s.rho[i];
        const double p = s.radial[i] * s.radial[i];
        weighted += r * p * r * h;
        flat_num += r * p * h;
        flat_den += p * h;
      }
      out.rho_e = weighted;
      out.rho_e_flat = flat_num / flat_den;
    }
  }
  out.delta_U_ueV = 1e3 * (out.U_meV[1] - out.U_meV[0]);
  out.bound = converged && out.U_meV[0] < out.rim_meV && out.U_meV[1] < out.rim_meV;

  if (table_points > 1) {
    out.potential_table.reserve(table_points);
    for (std::size_t j = 0; j < table_points; ++j) {
      const double r = rho_max * static_cast<double>(j) / static_cast<double>(table_points - 1);
      out.potential_table.emplace_back(r, potential(r));
    }
  }
  return out;
}

LateralSpectrum lateral_spectrum(const EnergyCurve& curve, const ThicknessProfile& profile,
                                 const RadialOptions& options, const PhysicalConstants& constants) {
  validate(profile);
  const double rho_max = options.rho_max > 0.0 ? options.rho_max : default_rho_max(profile);
  const double reference = curve(far_field_thickness(profile));
  auto potential = [&](double rho) { return curve(thickness_at(profile, rho)) - reference; };
  return radial_spectrum(potential, options.alpha_max, rho_max, options.n_points,
                         constants.hbar2_over_2me, options.table_points);
}

FieldResponse field_response(const DielectricStack& stack_template, const ThicknessProfile& profile,
                             std::span<const double> fields, const EnergyCurveOptions& curve_options,
                             const RadialOptions& radial_options) {
  validate(profile);
  const double rho_max =
      radial_options.rho_max > 0.0 ? radial_options.rho_max : default_rho_max(profile);
  const auto [lo, hi] = curve_range_for(profile, rho_max);

  FieldResponse out;
  for (double e_ex : fields) {
    FieldResponseRow row{e_ex, kNaN, kNaN, kNaN, false};
    try {
      const EnergyCurve curve = EnergyCurve::build(stack_template, {e_ex}, lo, hi, curve_options);
      RadialOptions ro = radial_options;
      ro.rho_max = rho_max;
      ro.table_points = 0;
      const LateralSpectrum spectrum = lateral_spectrum(curve, profile, ro, curve_options.constants);
      row.delta_U_ueV = spectrum.delta_U_ueV;
      row.rho_e = spectrum.rho_e;
      row.bound = spectrum.bound;
      if (const auto* p = std::get_if<PillarProfile>(&profile)) row.depth_meV = trap_depth(curve, *p);
    } catch (const UnboundError&) {
      row.bound = false;
    }
    out.rows.push_back(row);
  }

  // Nearest bound neighbours of E = 0 on each side.
  const FieldResponseRow* zero = nullptr;
  const FieldResponseRow* below = nullptr;
  const FieldResponseRow* above = nullptr;
  for (const auto& row : out.rows) {
    if (!row.bound) continue;
    if (row.e_ex == 0.0) zero = &row;
    if (row.e_ex < 0.0 && (!below || row.e_ex > below->e_ex)) below = &row;
    if (row.e_ex > 0.0 && (!above || row.e_ex < above->e_ex)) above = &row;
  }
  if (zero && below && above) {
    out.slope_negative = (zero->delta_U_ueV - below->delta_U_ueV) / (0.0 - below->e_ex);
    out.slope_positive = (above->delta_U_ueV - zero->delta_U_ueV) / above->e_ex;
    out.asymmetry_ratio = std::abs(out.slope_negative / out.slope_positive);
  } else {
    out.slope_negative = out.slope_positive = out.asymmetry_ratio = kNaN;
  }
  return out;
}

double harmonic_field_model(const HarmonicFieldModel& model, double e_ex, double hbar2_over_2m) {
  // hbar^2 beta1 E / m_e = 2 (hbar^2/2m) beta1 E  [meV^2] -> ueV^2
  const double radicand =
      model.hbar_omega0_ueV * model.hbar_omega0_ueV + 2.0 * hbar2_over_2m * model.beta1 * e_ex * 1e6;
  if (radicand < 0.0) {
    throw DomainError("harmonic_field_model: field " + std::to_string(e_ex) +
                      " V/m removes the harmonic confinement");
  }
  return std::sqrt(radicand);
}

HarmonicFit fit_harmonic_field_model(std::span<const double> fields, std::span<const double> delta_U_ueV,
                                     double hbar2_over_2m) {
  const std::size_t n = fields.size();
  if (n < 2 || delta_U_ueV.size() != n) {
    throw std::invalid_argument("fit_harmonic_field_model: need >= 2 matching points");
  }
  // Linear least squares y = a + c x on centred data.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += fields[i];
    my += delta_U_ueV[i] * delta_U_ueV[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = fields[i] - mx;
    sxx += dx * dx;
    sxy += dx * (delta_U_ueV[i] * delta_U_ueV[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_harmonic_field_model: fields must not all coincide");
  }
  const double c = sxy / sxx;
  const double a = my - c * mx;
  if (!(a > 0.0)) {
    throw NumericalError("fit_harmonic_field_model: fitted zero-field stiffness is not positive");
  }
  HarmonicFit fit;
  fit.model.hbar_omega0_ueV = std::sqrt(a);
  fit.model.beta1 = c / (2.0 * hbar2_over_2m * 1e6);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double radicand = a + c * fields[i];
    const double predicted = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
    ss += (predicted - delta_U_ueV[i]) * (predicted - delta_U_ueV[i]);
  }
  fit.rms_residual_ueV = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

}  // namespace neontrap
