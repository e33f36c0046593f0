#include "neontrap/layered_dielectric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "neontrap/errors.hpp"

namespace neontrap {

namespace {

constexpr double kQuadratureRelTol = 1e-10;
// Residual integrand decays like exp(-2k(z+L)); cut where it drops below 1e-14.
constexpr double kResidualDecades = 32.2;  // -ln(1e-14)

// Coefficients of Lambda written in q = exp(-2kL):
//   Lambda(q) = (a0 + a1 q) / (1 + g q)
struct RationalForm {
  double a0;
  double a1;
  double g;
};

RationalForm rational_form(const DielectricStack& stack) {
  const double en = stack.eps_neon();
  if (stack.is_superconducting()) {
    const double lam_inf = (1.0 - en) / (1.0 + en);
    return {lam_inf, -1.0, -lam_inf};
  }
  const double eb = std::get<DielectricSubstrate>(stack.substrate()).eps_b;
  const double a = (1.0 - eb) * en;
  const double b = eb - en * en;
  const double c = (1.0 + eb) * en;
  const double d = eb + en * en;
  return {(a + b) / (c + d), (a - b) / (c + d), (c - d) / (c + d)};
}

}  // namespace

DielectricStack::DielectricStack(double eps_neon, Substrate substrate, double thickness_nm)
    : eps_neon_(eps_neon), substrate_(substrate), thickness_(thickness_nm) {
  if (!(eps_neon_ > 1.0)) {
    throw DomainError("eps_neon must exceed 1, got " + std::to_string(eps_neon_));
  }
  if (const auto* d = std::get_if<DielectricSubstrate>(&substrate_); d && !(d->eps_b >= 1.0)) {
    throw DomainError("substrate permittivity must be >= 1, got " + std::to_string(d->eps_b));
  }
  if (std::isnan(thickness_) || thickness_ < 0.0) {
    throw DomainError("neon thickness must be >= 0 or infinite");
  }
}

DielectricStack DielectricStack::superconducting(double thickness_nm, double eps_neon) {
  return DielectricStack(eps_neon, Superconductor{}, thickness_nm);
}

DielectricStack DielectricStack::dielectric(double eps_b, double thickness_nm, double eps_neon) {
  return DielectricStack(eps_neon, DielectricSubstrate{eps_b}, thickness_nm);
}

double DielectricStack::bulk_reflection() const { return (1.0 - eps_neon_) / (1.0 + eps_neon_); }

double reflection_coefficient(const DielectricStack& stack, double k) {
  if (std::isnan(k) || k < 0.0) {
    throw DomainError("reflection_coefficient: k must be >= 0");
  }
  if (stack.is_bulk()) {
    return stack.bulk_reflection();
  }
  const double en = stack.eps_neon();
  const double t = std::tanh(k * stack.thickness());
  if (stack.is_superconducting()) {
    return (t - en) / (t + en);
  }
  const double eb = std::get<DielectricSubstrate>(stack.substrate()).eps_b;
  return ((1.0 - eb) * en + (eb - en * en) * t) / ((1.0 + eb) * en + (eb + en * en) * t);
}

double perpendicular_potential(const DielectricStack& stack, double z,
                               const PhysicalConstants& constants) {
  if (!(z > 0.0)) {
    throw DomainError("perpendicular_potential: z must be > 0, got " + std::to_string(z));
  }
  const double lam_inf = stack.bulk_reflection();
  const double bulk = lam_inf / (2.0 * z);
  if (stack.is_bulk()) {
    return constants.image_prefactor * bulk;
  }

  const double k_max = kResidualDecades / (2.0 * (z + stack.thickness()));
  auto residual = [&](double k) {
    return (reflection_coefficient(stack, k) - lam_inf) * std::exp(-2.0 * k * z);
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      residual, 0.0, k_max, 20, kQuadratureRelTol, &error);
  return constants.image_prefactor * (bulk + integral);
}

double image_series_oracle(const DielectricStack& stack, double z, int n_terms,
                           const PhysicalConstants& constants) {
  if (!(z > 0.0)) {
    throw DomainError("image_series_oracle: z must be > 0");
  }
  if (n_terms < 1) {
    throw DomainError("image_series_oracle: n_terms must be >= 1");
  }
  if (stack.is_bulk()) {
    throw DomainError("image_series_oracle: bulk neon has a closed form; no series needed");
  }
  // (a0 + a1 q) sum_n (-g q)^n = a0 + sum_{n>=1} [a0 (-g)^n + a1 (-g)^(n-1)] q^n,
  // and each q^n exp(-2kz) integrates to 1 / (2 (z + n L)).
  const auto [a0, a1, g] = rational_form(stack);
  const double L = stack.thickness();
  double sum = a0 / (2.0 * z);
  double power = 1.0;  // (-g)^(n-1)
  for (int n = 1; n < n_terms; ++n) {
    const double coeff = a0 * power * (-g) + a1 * power;
    sum += coeff / (2.0 * (z + n * L));
    power *= -g;
  }
  return constants.image_prefactor * sum;
}

double external_potential_slope(const DielectricStack& stack, double z) {
  const double L = stack.is_bulk() ? 0.0 : stack.thickness();
  if (!stack.is_bulk() && z < -L) {
    throw DomainError("external_potential: z = " + std::to_string(z) + " lies inside the substrate");
  }
  const double ratio = 1.0 / stack.eps_neon();
  const double length = z < 0.0 ? ratio * (z + L) : ratio * L + z;
  return units::kFieldToMeVPerNm * length;
}

double external_potential(const DielectricStack& stack, FieldSpec field, double z) {
  return field.e_ex * external_potential_slope(stack, z);
}

double capped_image_potential(const DielectricStack& stack, double z,
                              const PhysicalConstants& constants) {
  if (z < 0.0) {
    return constants.barrier_height;
  }
  return perpendicular_potential(stack, std::max(z, constants.cutoff_zc), constants);
}

double total_perpendicular_potential(const DielectricStack& stack, FieldSpec field, double z,
                                     const PhysicalConstants& constants) {
  return capped_image_potential(stack, z, constants) + external_potential(stack, field, z);
}

PotentialCache::Samples PotentialCache::samples(const DielectricStack& stack, double z_min,
                                                double z_max, std::size_t n_points,
                                                const PhysicalConstants& constants) {
  const auto* diel = std::get_if<DielectricSubstrate>(&stack.substrate());
  const Key key{stack.eps_neon(),
                static_cast<int>(stack.substrate().index()),
                diel ? diel->eps_b : 0.0,
                stack.thickness(),
                z_min,
                z_max,
                n_points,
                constants.image_prefactor,
                constants.barrier_height,
                constants.cutoff_zc};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      return it->second;
    }
  }

  auto values = std::make_shared<std::vector<double>>(n_points);
  const double spacing = (z_max - z_min) / static_cast<double>(n_points - 1);
  // All samples in [0, zc) share the capped value.
  double capped = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n_points; ++i) {
    const double z = z_min + spacing * static_cast<double>(i);
    if (std::abs(z) < 0.5 * spacing) {
      // Cell straddling the neon surface: average the barrier step over the cell.
      const double below = 0.5 - z / spacing;
      if (std::isnan(capped)) capped = capped_image_potential(stack, 0.0, constants);
      (*values)[i] = below * constants.barrier_height + (1.0 - below) * capped;
    } else if (z >= 0.0 && z < constants.cutoff_zc) {
      if (std::isnan(capped)) {
        capped = capped_image_potential(stack, z, constants);
      }
      (*values)[i] = capped;
    } else {
      (*values)[i] = capped_image_potential(stack, z, constants);
    }
  }

  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(values));
  return it->second;
}

std::size_t PotentialCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void PotentialCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

PotentialCache& PotentialCache::global() {
  static PotentialCache cache;
  return cache;
}

}  // namespace neontrap
