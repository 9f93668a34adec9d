#include "cdsim/mie.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "cdsim/errors.hpp"
#include "cdsim/units.hpp"

namespace cdsim {

double MieInput::size_parameter() const { return units::k0 * radius; }

namespace {

// Riccati-Bessel psi_n(x) = x j_n(x) for n = 0..nmax. The ratios
// psi_n/psi_{n-1} are generated by downward recurrence (stable for j),
// then anchored at psi_0 = sin x, or at psi_1 when x is near a zero of sin.
std::vector<double> riccati_psi(double x, int nmax) {
  std::vector<double> ratio(nmax + 1, 0.0);
  const int start = nmax + 15;
  double r = x / (2.0 * start + 1.0);
  for (int n = start; n >= 1; --n) {
    r = 1.0 / ((2.0 * n + 1.0) / x - r);
    if (n <= nmax) ratio[n] = r;
  }
  std::vector<double> psi(nmax + 1);
  const double sinx = std::sin(x);
  if (std::abs(sinx) >= 0.1 || nmax == 0) {
    psi[0] = sinx;
    for (int n = 1; n <= nmax; ++n) psi[n] = ratio[n] * psi[n - 1];
  } else {
    psi[1] = sinx / x - std::cos(x);
    psi[0] = psi[1] / ratio[1];
    for (int n = 2; n <= nmax; ++n) psi[n] = ratio[n] * psi[n - 1];
  }
  return psi;
}

// chi_n(x) = -x y_n(x); upward recurrence is stable for the irregular
// solution.
std::vector<double> riccati_chi(double x, int nmax) {
  std::vector<double> chi(nmax + 1);
  chi[0] = std::cos(x);
  if (nmax >= 1) chi[1] = std::cos(x) / x + std::sin(x);
  for (int n = 1; n + 1 <= nmax; ++n)
    chi[n + 1] = (2.0 * n + 1.0) / x * chi[n] - chi[n - 1];
  return chi;
}

// Logarithmic derivative D_n(rho) = psi_n'(rho)/psi_n(rho) at complex
// argument, downward recurrence.
std::vector<Complex> log_derivative(Complex rho, int nmax) {
  const int start = std::max(nmax, static_cast<int>(std::ceil(std::abs(rho)))) + 16;
  std::vector<Complex> d(nmax + 1, Complex(0.0, 0.0));
  Complex dn(0.0, 0.0);
  for (int n = start; n >= 1; --n) {
    const Complex noverrho = static_cast<double>(n) / rho;
    dn = noverrho - 1.0 / (dn + noverrho);
    if (n - 1 <= nmax) d[n - 1] = dn;
  }
  return d;
}

// Partial sum of (2l+1) Re(a_l + b_l) up to lmax.
double extinction_sum(double x, Complex m, int lmax) {
  const std::vector<double> psi = riccati_psi(x, lmax);
  const std::vector<double> chi = riccati_chi(x, lmax);
  const std::vector<Complex> d = log_derivative(m * x, lmax);
  double sum = 0.0;
  for (int n = 1; n <= lmax; ++n) {
    const Complex xi_n(psi[n], -chi[n]);
    const Complex xi_nm1(psi[n - 1], -chi[n - 1]);
    const double noverx = static_cast<double>(n) / x;
    const Complex fa = d[n] / m + noverx;
    const Complex fb = d[n] * m + noverx;
    const Complex an = (fa * psi[n] - psi[n - 1]) / (fa * xi_n - xi_nm1);
    const Complex bn = (fb * psi[n] - psi[n - 1]) / (fb * xi_n - xi_nm1);
    sum += (2.0 * n + 1.0) * (an.real() + bn.real());
  }
  return sum;
}

}  // namespace

double mie_extinction(const MieInput& input) {
  if (!(input.radius > 0.0)) throw Error("mie_extinction requires radius > 0");
  if (input.refractive_index.imag() < 0.0)
    throw Error("mie_extinction requires Im(m) >= 0");
  const double x = input.size_parameter();
  const Complex m = input.refractive_index;
  if (m == Complex(1.0, 0.0)) return 0.0;  // no contrast

  const int lmax = static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
  const double s1 = extinction_sum(x, m, lmax);
  const double s2 = extinction_sum(x, m, lmax + 5);
  const double scale = std::max(std::abs(s2), 1e-300);
  if (!std::isfinite(s1) || !std::isfinite(s2) || std::abs(s2 - s1) / scale > 1e-8)
    throw MieError("partial-wave series failed the tail-convergence test");

  const double prefactor = 2.0 * std::numbers::pi / (units::k0 * units::k0);
  return prefactor * s1;
}

double microscopic_cross_section(const CloudRealization& realization,
                                 const ExcitationAmplitudes& amplitudes,
                                 int polarization) {
  if (amplitudes.polarization != polarization)
    throw Error("amplitudes were solved for a different drive polarization");
  if (amplitudes.b.size() != 3 * realization.atom_count())
    throw Error("amplitudes do not belong to this realization");

  const int ms_row = zeeman_index(polarization);
  Complex forward(0.0, 0.0);
  for (int a = 0; a < realization.atom_count(); ++a) {
    const double z = realization.positions[a].z();
    forward += amplitudes.b(3 * a + ms_row) * std::exp(Complex(0.0, -units::k0 * z));
  }
  const double c = -3.0 * std::numbers::pi * units::gamma0 / (units::k0 * units::k0);
  return c * forward.imag();
}

}  // namespace cdsim
