#pragma once

#include <Eigen/Core>
#include <complex>

namespace cdsim {

using Complex = std::complex<double>;

// Zeeman projections m = -1, 0, +1 are stored in that order.
inline constexpr int zeeman_index(int m) { return m + 1; }

// Spherical basis vectors as matrix columns (e_{-1}, e_0, e_{+1}):
//   e_{+-1} = -+(x +- i y)/sqrt(2),  e_0 = z   (Condon-Shortley phases).
const Eigen::Matrix3cd& spherical_basis();

// Resonant dipole-dipole coupling kernel between two atoms separated by r
// (lengths in 1/k0), as a 3x3 Cartesian matrix in units of gamma0:
//   G(r) = (3/4) e^{ix}/x^3 [ (1 - ix - x^2) I - (3 - 3ix - x^2) rhat rhat^T ],
// x = |r|. Throws Error for |r| = 0.
Eigen::Matrix3cd dyadic_kernel(const Eigen::Vector3d& r);

// The same kernel contracted into the Zeeman basis,
//   B(m, m') = sum_{uv} conj(e_m)_u G^{uv} (e_m')_v.
// For r along z the block is diagonal: B(+-1,+-1) transverse, B(0,0)
// longitudinal.
Eigen::Matrix3cd zeeman_block(const Eigen::Vector3d& r);

// Single-atom self-energy, -i gamma0/2; the Lamb shift is absorbed into the
// transition frequency.
Complex self_energy();

}  // namespace cdsim
