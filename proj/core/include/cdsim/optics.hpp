#pragma once

#include <complex>

#include "cdsim/dispersion.hpp"

namespace cdsim {

// Macroscopic constants derived from one fitted wavenumber. All errors are
// first-order (delta method) propagations of the fit standard errors.
struct OpticalConstants {
  double detuning = 0.0;  // units gamma0
  double k_re = 0.0, k_re_err = 0.0;
  double k_im = 0.0, k_im_err = 0.0;
  double n_re = 0.0, n_re_err = 0.0;  // refractive index n = k/k0
  double n_im = 0.0, n_im_err = 0.0;
  double eps_re = 0.0, eps_re_err = 0.0;
  double eps_im = 0.0, eps_im_err = 0.0;
  double alpha_re = 0.0, alpha_re_err = 0.0;  // units 1/k0^3
  double alpha_im = 0.0, alpha_im_err = 0.0;
  double ioffe_regel = 0.0, ioffe_regel_err = 0.0;
  bool ioffe_regel_defined = false;
  double r2_amplitude = 0.0, r2_phase = 0.0;
  int bins_used = 0;
};

struct Permittivity {
  double re = 0.0, re_err = 0.0;
  double im = 0.0, im_err = 0.0;

  Complex value() const { return {re, im}; }
};

// eps' = (k'^2 - k''^2)/k0^2, eps'' = 2 k' k''/k0^2.
Permittivity permittivity(const ComplexWavenumber& k);

// Lorentz-Lorenz polarizability alpha = 3 (eps - 1) / (4 pi n (eps + 2)).
// Throws Error at the eps = -2 pole.
Complex lorentz_lorenz(Complex eps, double density);

struct Polarizability {
  double re = 0.0, re_err = 0.0;
  double im = 0.0, im_err = 0.0;
};

Polarizability lorentz_lorenz_with_errors(const Permittivity& eps, double density);

struct IoffeRegelRatio {
  double value = 0.0;
  double error = 0.0;
  // k'' <= 0 (gain-free medium should not produce it beyond noise) leaves
  // the ratio undefined; it is flagged, never clamped.
  bool defined = false;
};

// Transport-length to wavelength estimate k' / (2 k'').
IoffeRegelRatio ioffe_regel(const ComplexWavenumber& k);

// Free-atom polarizability -(3/4) / (Delta + i/2) in 1/k0^3 units; its
// on-resonance value 3i/2 corresponds to the resonant cross section
// 6 pi / k0^2.
Complex free_atom_polarizability(double detuning);

OpticalConstants derive_optical_constants(double detuning, const ComplexWavenumber& k,
                                          double density);

}  // namespace cdsim
