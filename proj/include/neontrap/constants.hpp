#pragma once

// Physical constants and unit conversions shared by every module.
//
// Working units: lengths in nm, energies in meV, external fields in V/m.

namespace neontrap {

struct PhysicalConstants {
  double hbar2_over_2me = 38.0998;   // meV nm^2
  double image_prefactor = 719.982;  // e^2/(8 pi eps0), meV nm
  double barrier_height = 700.0;     // meV
  double cutoff_zc = 0.23;           // nm
  double eps_neon_default = 1.244;
  double eps_si_default = 12.0;
};

inline constexpr PhysicalConstants kDefaultConstants{};

namespace units {

// e * (1 V/m) * (1 nm) = 1e-9 eV = 1e-6 meV
inline constexpr double kFieldToMeVPerNm = 1e-6;

inline constexpr double kJoulePerMeV = 1.602176634e-22;
inline constexpr double kKgPerAmu = 1.66053906660e-27;
inline constexpr double kMeterPerNm = 1e-9;
inline constexpr double kMm2PerSToNm2PerS = 1e12;
inline constexpr double kStandardGravity = 9.81;  // m/s^2

}  // namespace units
}  // namespace neontrap
