#pragma once

namespace cdsim::units {

// Dimensionless unit system used throughout:
//   lengths in units of 1/k0, where k0 = omega_a/c is the vacuum wavenumber
//   of the resonant transition; frequencies and rates in units of the
//   natural linewidth gamma0; hbar = 1.
// The squared dipole matrix element then is d^2/hbar = (3/4) gamma0 k0^-3,
// which pins the dimensionless prefactor of the dipole-dipole kernel.
inline constexpr double k0 = 1.0;
inline constexpr double gamma0 = 1.0;

}  // namespace cdsim::units
