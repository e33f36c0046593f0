#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <variant>
#include <vector>

#include "neontrap/constants.hpp"

namespace neontrap {

inline constexpr double kInfiniteThickness = std::numeric_limits<double>::infinity();

struct Superconductor {};

struct DielectricSubstrate {
  double eps_b = 12.0;  // relative permittivity
};

using Substrate = std::variant<Superconductor, DielectricSubstrate>;

// Vacuum (z > 0) / neon (-L < z < 0) / substrate (z < -L).
class DielectricStack {
 public:
  // Throws DomainError on eps_neon <= 1, eps_b < 1, negative or NaN thickness.
  // thickness == 0 is accepted for the mirror-charge limit only.
  DielectricStack(double eps_neon, Substrate substrate, double thickness_nm);

  static DielectricStack superconducting(double thickness_nm,
                                         double eps_neon = kDefaultConstants.eps_neon_default);
  static DielectricStack dielectric(double eps_b, double thickness_nm,
                                    double eps_neon = kDefaultConstants.eps_neon_default);

  double eps_neon() const { return eps_neon_; }
  const Substrate& substrate() const { return substrate_; }
  double thickness() const { return thickness_; }
  bool is_bulk() const { return thickness_ == kInfiniteThickness; }
  bool is_superconducting() const { return std::holds_alternative<Superconductor>(substrate_); }

  DielectricStack with_thickness(double thickness_nm) const {
    return DielectricStack(eps_neon_, substrate_, thickness_nm);
  }

  // Lambda at k L -> infinity: (1 - eps_Ne) / (1 + eps_Ne).
  double bulk_reflection() const;

 private:
  double eps_neon_;
  Substrate substrate_;
  double thickness_;
};

// Uniform field along +z, in V/m.
struct FieldSpec {
  double e_ex = 0.0;
};

double reflection_coefficient(const DielectricStack& stack, double k);

// Self-image potential V_perp(L, z) in meV for an electron at height z (nm) above the
// neon surface. Closed-form bulk part plus adaptive quadrature of the finite-L residual.
double perpendicular_potential(const DielectricStack& stack, double z,
                               const PhysicalConstants& constants = kDefaultConstants);

// Partial sum of the multiple-image expansion of the same potential. Test oracle.
double image_series_oracle(const DielectricStack& stack, double z, int n_terms,
                           const PhysicalConstants& constants = kDefaultConstants);

// Piecewise-linear potential of the applied field, zero on the grounded substrate
// surface z = -L. For bulk neon the reference moves to the vacuum/neon interface.
double external_potential(const DielectricStack& stack, FieldSpec field, double z);

// d V_ex / d E_ex at z, in meV per (V/m).
double external_potential_slope(const DielectricStack& stack, double z);

// The potential fed to the perpendicular eigensolver:
//   z < 0            barrier_height + V_ex (inside neon)
//   0 <= z < zc      V_perp(zc) + V_ex     (atomic-scale cutoff)
//   z >= zc          V_perp(z) + V_ex
double total_perpendicular_potential(const DielectricStack& stack, FieldSpec field, double z,
                                     const PhysicalConstants& constants = kDefaultConstants);

// Field-free part of total_perpendicular_potential, i.e. barrier or capped image term.
double capped_image_potential(const DielectricStack& stack, double z,
                              const PhysicalConstants& constants = kDefaultConstants);

// Memoizes capped image-potential samples on a uniform z grid. Safe for concurrent use;
// a miss computes outside the lock, so two racing misses may both compute (same result).
class PotentialCache {
 public:
  using Samples = std::shared_ptr<const std::vector<double>>;

  Samples samples(const DielectricStack& stack, double z_min, double z_max, std::size_t n_points,
                  const PhysicalConstants& constants = kDefaultConstants);

  std::size_t size() const;
  void clear();

  static PotentialCache& global();

 private:
  using Key = std::tuple<double, int, double, double, double, double, std::size_t, double, double,
                         double>;
  mutable std::mutex mutex_;
  std::map<Key, Samples> entries_;
};

}  // namespace neontrap
