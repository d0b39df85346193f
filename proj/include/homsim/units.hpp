#pragma once

#include <numbers>

#include "homsim/errors.hpp"

// Internal units: angular frequency in rad/ps, time in ps.
namespace homsim::units {

inline constexpr double c_nm_per_ps = 299792.458;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Ordinary frequency in THz (cycles/ps) to rad/ps.
inline constexpr double thz_to_rad_ps(double f_thz) { return two_pi * f_thz; }
inline constexpr double rad_ps_to_thz(double w) { return w / two_pi; }

inline double nm_to_rad_ps(double lambda_nm) {
  detail::require(lambda_nm > 0.0, "wavelength must be positive");
  return two_pi * c_nm_per_ps / lambda_nm;
}

inline double rad_ps_to_nm(double w) {
  detail::require(w > 0.0, "angular frequency must be positive");
  return two_pi * c_nm_per_ps / w;
}

// Spectral width in wavelength to angular-frequency width at center lambda0.
inline double wavelength_width_to_frequency(double lambda0_nm, double dlambda_nm) {
  detail::require(lambda0_nm > 0.0, "center wavelength must be positive");
  detail::require(dlambda_nm >= 0.0, "wavelength width must be non-negative");
  return two_pi * c_nm_per_ps * dlambda_nm / (lambda0_nm * lambda0_nm);
}

}  // namespace homsim::units
