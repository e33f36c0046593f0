#include "neontrap/growth_estimates.hpp"

#include <cmath>

#include "neontrap/constants.hpp"
#include "neontrap/errors.hpp"

namespace neontrap {

void NeonMaterialData::validate() const {
  if (!(gamma_sl > 0.0) || !(molar_volume > 0.0) || !(enthalpy_fusion > 0.0) || !(t_bulk > 0.0) ||
      !(atomic_mass > 0.0) || !(diffusion_coefficient > 0.0)) {
    throw DomainError("neon material data must be positive");
  }
}

double gibbs_thomson_coefficient(const NeonMaterialData& material) {
  material.validate();
  const double kelvin_metre =
      -2.0 * material.gamma_sl * material.molar_volume * material.t_bulk / material.enthalpy_fusion;
  return kelvin_metre / units::kMeterPerNm;
}

double gibbs_thomson_shift(const NeonMaterialData& material, double r_c_nm) {
  if (r_c_nm == 0.0 || std::isnan(r_c_nm)) {
    throw DomainError("gibbs_thomson_shift: radius of curvature must be non-zero");
  }
  return gibbs_thomson_coefficient(material) / r_c_nm;
}

double diffusion_length(const NeonMaterialData& material, double t_seconds) {
  material.validate();
  if (t_seconds < 0.0) {
    throw DomainError("diffusion_length: time must be >= 0");
  }
  return std::sqrt(material.diffusion_coefficient * units::kMm2PerSToNm2PerS * t_seconds);
}

double gravity_potential_difference(const NeonMaterialData& material, double delta_h_nm) {
  material.validate();
  if (delta_h_nm < 0.0) {
    throw DomainError("gravity_potential_difference: height difference must be >= 0");
  }
  const double joule = material.atomic_mass * units::kKgPerAmu * units::kStandardGravity *
                       delta_h_nm * units::kMeterPerNm;
  return joule / units::kJoulePerMeV;
}

}  // namespace neontrap
