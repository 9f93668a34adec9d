#include "cdsim/optics.hpp"

#include <cmath>
#include <numbers>

#include "cdsim/errors.hpp"
#include "cdsim/units.hpp"

namespace cdsim {

Permittivity permittivity(const ComplexWavenumber& k) {
  const double k02 = units::k0 * units::k0;
  Permittivity eps;
  eps.re = (k.k_re * k.k_re - k.k_im * k.k_im) / k02;
  eps.im = 2.0 * k.k_re * k.k_im / k02;
  eps.re_err = 2.0 / k02 *
               std::hypot(k.k_re * k.k_re_err, k.k_im * k.k_im_err);
  eps.im_err = 2.0 / k02 *
               std::hypot(k.k_im * k.k_re_err, k.k_re * k.k_im_err);
  return eps;
}

Complex lorentz_lorenz(Complex eps, double density) {
  if (!(density > 0.0)) throw Error("lorentz_lorenz requires density > 0");
  const Complex denom = eps + 2.0;
  if (std::abs(denom) < 1e-12)
    throw Error("lorentz_lorenz pole: eps = -2");
  return 3.0 / (4.0 * std::numbers::pi * density) * (eps - 1.0) / denom;
}

Polarizability lorentz_lorenz_with_errors(const Permittivity& eps, double density) {
  const Complex value = lorentz_lorenz(eps.value(), density);
  // alpha is analytic in eps, d alpha/d eps = 9 / (4 pi n (eps+2)^2); the
  // real and imaginary parts of eps carry independent errors.
  const Complex d = 9.0 / (4.0 * std::numbers::pi * density) /
                    ((eps.value() + 2.0) * (eps.value() + 2.0));
  Polarizability out;
  out.re = value.real();
  out.im = value.imag();
  out.re_err = std::hypot(d.real() * eps.re_err, d.imag() * eps.im_err);
  out.im_err = std::hypot(d.imag() * eps.re_err, d.real() * eps.im_err);
  return out;
}

IoffeRegelRatio ioffe_regel(const ComplexWavenumber& k) {
  IoffeRegelRatio out;
  if (!(k.k_im > 0.0)) return out;
  out.defined = true;
  out.value = k.k_re / (2.0 * k.k_im);
  out.error = std::hypot(k.k_re_err / (2.0 * k.k_im),
                         k.k_re * k.k_im_err / (2.0 * k.k_im * k.k_im));
  return out;
}

Complex free_atom_polarizability(double detuning) {
  return -0.75 * units::gamma0 / Complex(detuning, 0.5 * units::gamma0);
}

OpticalConstants derive_optical_constants(double detuning, const ComplexWavenumber& k,
                                          double density) {
  OpticalConstants oc;
  oc.detuning = detuning;
  oc.k_re = k.k_re;
  oc.k_re_err = k.k_re_err;
  oc.k_im = k.k_im;
  oc.k_im_err = k.k_im_err;
  oc.n_re = k.k_re / units::k0;
  oc.n_re_err = k.k_re_err / units::k0;
  oc.n_im = k.k_im / units::k0;
  oc.n_im_err = k.k_im_err / units::k0;

  const Permittivity eps = permittivity(k);
  oc.eps_re = eps.re;
  oc.eps_re_err = eps.re_err;
  oc.eps_im = eps.im;
  oc.eps_im_err = eps.im_err;

  const Polarizability alpha = lorentz_lorenz_with_errors(eps, density);
  oc.alpha_re = alpha.re;
  oc.alpha_re_err = alpha.re_err;
  oc.alpha_im = alpha.im;
  oc.alpha_im_err = alpha.im_err;

  const IoffeRegelRatio ratio = ioffe_regel(k);
  oc.ioffe_regel = ratio.value;
  oc.ioffe_regel_err = ratio.error;
  oc.ioffe_regel_defined = ratio.defined;

  oc.r2_amplitude = k.r2_amplitude;
  oc.r2_phase = k.r2_phase;
  oc.bins_used = k.bins_used;
  return oc;
}

}  // namespace cdsim
