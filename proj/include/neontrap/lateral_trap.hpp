#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "neontrap/bound_states.hpp"
#include "neontrap/constants.hpp"
#include "neontrap/layered_dielectric.hpp"
#include "neontrap/spline.hpp"

namespace neontrap {

// Neon thinned by delta_L over a pillar of radius R; b sets the width of the step.
struct PillarProfile {
  double L0 = 10.0;
  double delta_L = 0.5;
  double R = 110.0;
  double b = 2.0;
};

// L(rho) = L0 (1 + beta0 rho^2)
struct QuadraticProfile {
  double L0 = 10.0;
  double beta0 = 1e-5;  // nm^-2
};

using ThicknessProfile = std::variant<PillarProfile, QuadraticProfile>;

// Throws DomainError when the geometry violates 0 < delta_L < L0, R > 0, b > 0, beta0 > 0.
void validate(const ThicknessProfile& profile);

double thickness_at(const ThicknessProfile& profile, double rho);
double far_field_thickness(const ThicknessProfile& profile);

// Smallest and largest L(rho) over [0, rho_max].
std::pair<double, double> thickness_range(const ThicknessProfile& profile, double rho_max);

// Default outer radius of the radial box: max(3R, R + 200 nm) for pillars. Quadratic
// profiles have no natural scale and need an explicit radius.
double default_rho_max(const ThicknessProfile& profile);

struct EnergyCurveOptions {
  std::size_t n_knots = 60;
  std::size_t held_out = 5;          // mid-knot points re-solved to validate the spline
  double validation_budget = 0.01;   // meV
  std::size_t workers = 1;
  PerpendicularOptions perpendicular{};
  PhysicalConstants constants{};
};

// W^G(L) at fixed substrate and field, as a natural cubic spline over log-spaced knots.
class EnergyCurve {
 public:
  // Solves W^G at every knot (in parallel over `workers`), then checks held-out
  // mid-knot points against fresh solves. Throws UnboundError naming the first
  // unbound knot, NumericalError if the spline misses the validation budget.
  static EnergyCurve build(const DielectricStack& stack_template, FieldSpec field, double L_lo,
                           double L_hi, const EnergyCurveOptions& options = {});

  // Throws DomainError outside [L_min, L_max].
  double operator()(double L) const;

  double L_min() const { return spline_.x_min(); }
  double L_max() const { return spline_.x_max(); }
  const std::vector<double>& knots() const { return spline_.knots(); }
  const std::vector<double>& values() const { return spline_.values(); }
  double validation_error() const { return validation_error_; }
  FieldSpec field() const { return field_; }

 private:
  EnergyCurve(CubicSpline spline, FieldSpec field, double validation_error)
      : spline_(std::move(spline)), field_(field), validation_error_(validation_error) {}

  CubicSpline spline_;
  FieldSpec field_;
  double validation_error_ = 0.0;
};

// Local-thickness approximation: V_par(rho) = W^G(L(rho)) - W^G(L0), meV.
double lta_potential(const EnergyCurve& curve, const ThicknessProfile& profile, double rho);

// V0 = W^G(L0) - W^G(L0 - delta_L) > 0, meV.
double trap_depth(const EnergyCurve& curve, const PillarProfile& pillar);

// Returns a message when the step width b is below the electron height h_e(L0), the
// regime where the local-thickness approximation is no longer justified.
std::optional<std::string> lta_validity_warning(const DielectricStack& stack_template, FieldSpec field,
                                                const PillarProfile& pillar,
                                                const PerpendicularOptions& options = {},
                                                const PhysicalConstants& constants = kDefaultConstants);

struct RadialState {
  double energy = 0.0;              // meV
  std::vector<double> rho;          // cell centres, nm
  std::vector<double> radial;       // R(rho), normalized with measure rho d rho
  bool converged = false;
};

// Lowest state of angular momentum alpha in a disk of radius rho_max (hard wall).
// Discretized in u = sqrt(rho) R on cell centres rho_i = (i + 1/2) h with the
// flux-conservative form of (1/rho) d/drho (rho d/drho), which stays second order for alpha = 0.
RadialState radial_lowest_state(const PotentialSampler& potential, int alpha, double rho_max,
                                std::size_t n_points,
                                double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);

struct LateralSpectrum {
  std::vector<double> U_meV;  // lowest eigenvalue per alpha = 0..alpha_max
  double delta_U_ueV = 0.0;   // U_1 - U_0
  double rho_e = 0.0;         // <rho> of the alpha = 1 state, measure rho d rho
  double rho_e_flat = 0.0;    // same with measure d rho (reported for comparison)
  double rim_meV = 0.0;       // V_par at the outer radius
  bool bound = false;         // U_0 and U_1 below the rim
  std::vector<std::pair<double, double>> potential_table;  // (rho, V_par)

  double U_ueV(std::size_t alpha) const { return 1e3 * U_meV.at(alpha); }
};

LateralSpectrum radial_spectrum(const PotentialSampler& potential, int alpha_max, double rho_max,
                                std::size_t n_points = 16384,
                                double hbar2_over_2m = kDefaultConstants.hbar2_over_2me,
                                std::size_t table_points = 0);

struct RadialOptions {
  std::size_t n_points = 16384;
  double rho_max = 0.0;  // 0 selects default_rho_max(profile)
  int alpha_max = 1;
  std::size_t table_points = 400;
};

// Spectrum of the LTA potential built from `curve` and `profile`.
LateralSpectrum lateral_spectrum(const EnergyCurve& curve, const ThicknessProfile& profile,
                                 const RadialOptions& options = {},
                                 const PhysicalConstants& constants = kDefaultConstants);

// L range an EnergyCurve must cover for this profile, with a small margin on both sides.
std::pair<double, double> curve_range_for(const ThicknessProfile& profile, double rho_max);

struct FieldResponseRow {
  double e_ex = 0.0;         // V/m
  double delta_U_ueV = 0.0;
  double rho_e = 0.0;        // nm
  double depth_meV = 0.0;    // V0 for pillar profiles, NaN otherwise
  bool bound = false;
};

struct FieldResponse {
  std::vector<FieldResponseRow> rows;  // in the order of the requested fields
  // One-sided slopes of delta_U around E = 0 using the nearest bound neighbours, ueV per V/m.
  // NaN when E = 0 or a neighbour on either side is missing.
  double slope_negative = 0.0;
  double slope_positive = 0.0;
  double asymmetry_ratio = 0.0;  // |slope_negative / slope_positive|
};

// One EnergyCurve per field value; unbound fields are kept as flagged rows.
FieldResponse field_response(const DielectricStack& stack_template, const ThicknessProfile& profile,
                             std::span<const double> fields, const EnergyCurveOptions& curve_options = {},
                             const RadialOptions& radial_options = {});

// delta_U(E) = hbar sqrt(omega0^2 + beta1 E / m_e) for a harmonic lateral trap whose
// stiffness m_e omega0^2 is shifted by beta1 E.
struct HarmonicFieldModel {
  double hbar_omega0_ueV = 0.0;
  double beta1 = 0.0;  // meV nm^-2 per (V/m)
};

// Throws DomainError when the radicand is negative (the field has destroyed the trap).
double harmonic_field_model(const HarmonicFieldModel& model, double e_ex,
                            double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);

struct HarmonicFit {
  HarmonicFieldModel model;
  double rms_residual_ueV = 0.0;
};

// Least squares on delta_U^2 = (hbar omega0)^2 + (hbar^2 beta1 / m_e) E.
HarmonicFit fit_harmonic_field_model(std::span<const double> fields, std::span<const double> delta_U_ueV,
                                     double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);

}  // namespace neontrap
