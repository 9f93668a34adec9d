#include "cdsim/green.hpp"

#include <cmath>

#include "cdsim/errors.hpp"
#include "cdsim/units.hpp"

namespace cdsim {

namespace {

constexpr Complex kImag{0.0, 1.0};

struct KernelScalars {
  Complex transverse;    // coefficient of the identity
  Complex longitudinal;  // coefficient of rhat rhat^T (or u u^dagger)
};

// (3/4) e^{ix}/x^3 (1 - ix - x^2)  and  -(3/4) e^{ix}/x^3 (3 - 3ix - x^2).
// The 3/4 prefactor is d^2 k0^3 / hbar in linewidth units; it makes
// Im B(m,m) -> -1/2 as x -> 0, matching the self-energy.
KernelScalars kernel_scalars(double x) {
  const Complex phase = std::exp(kImag * x);
  const double inv_x3 = 1.0 / (x * x * x);
  const double pre = 0.75 * units::gamma0 * inv_x3;
  const Complex a = pre * phase * Complex(1.0 - x * x, -x);
  const Complex b = -pre * phase * Complex(3.0 - x * x, -3.0 * x);
  return {a, b};
}

}  // namespace

const Eigen::Matrix3cd& spherical_basis() {
  static const Eigen::Matrix3cd basis = [] {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix3cd e;
    e.col(0) = Eigen::Vector3cd(Complex(s, 0), Complex(0, -s), 0);   // e_{-1}
    e.col(1) = Eigen::Vector3cd(0, 0, 1);                            // e_0
    e.col(2) = Eigen::Vector3cd(Complex(-s, 0), Complex(0, -s), 0);  // e_{+1}
    return e;
  }();
  return basis;
}

Eigen::Matrix3cd dyadic_kernel(const Eigen::Vector3d& r) {
  const double x = r.norm();
  if (x == 0.0) throw Error("dyadic kernel is undefined at zero separation");
  const Eigen::Vector3d rhat = r / x;
  const auto [a, b] = kernel_scalars(x);
  Eigen::Matrix3cd g = a * Eigen::Matrix3cd::Identity();
  g += b * (rhat * rhat.transpose()).cast<Complex>();
  return g;
}

Eigen::Matrix3cd zeeman_block(const Eigen::Vector3d& r) {
  const double x = r.norm();
  if (x == 0.0) throw Error("dipole-dipole block is undefined at zero separation");
  const Eigen::Vector3d rhat = r / x;
  const auto [a, b] = kernel_scalars(x);
  // u_m = conj(e_m) . rhat; then B = a I + b u u^dagger.
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Vector3cd u;
  u(0) = s * Complex(rhat.x(), rhat.y());
  u(1) = rhat.z();
  u(2) = -s * Complex(rhat.x(), -rhat.y());
  Eigen::Matrix3cd blk = a * Eigen::Matrix3cd::Identity();
  blk += b * (u * u.adjoint());
  return blk;
}

Complex self_energy() { return Complex(0.0, -0.5 * units::gamma0); }

}  // namespace cdsim
