#pragma once

namespace neontrap {

// Solid neon near its triple point.
struct NeonMaterialData {
  double gamma_sl = 4.36e-3;        // J/m^2
  double molar_volume = 13.98e-6;   // m^3/mol
  double enthalpy_fusion = 328.0;   // J/mol
  double t_bulk = 24.56;            // K
  double atomic_mass = 20.18;       // u
  double diffusion_coefficient = 1e-3;  // mm^2/s

  // Throws DomainError unless every field is positive.
  void validate() const;
};

// Gibbs-Thomson coefficient Delta T * r_c, in K nm (negative).
double gibbs_thomson_coefficient(const NeonMaterialData& material = {});

// Melting-point shift in K for a radius of curvature r_c in nm (positive for a bump,
// negative for a valley). Throws DomainError for r_c = 0.
double gibbs_thomson_shift(const NeonMaterialData& material, double r_c_nm);

// sqrt(D t) in nm for t in seconds.
double diffusion_length(const NeonMaterialData& material, double t_seconds);

// m_Ne g dh in meV for a height difference in nm.
double gravity_potential_difference(const NeonMaterialData& material, double delta_h_nm);

}  // namespace neontrap
