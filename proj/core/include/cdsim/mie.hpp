#pragma once

#include <complex>

#include "cdsim/cloud.hpp"
#include "cdsim/solver.hpp"

namespace cdsim {

// Homogeneous sphere illuminated by a plane wave.
struct MieInput {
  double radius = 0.0;                       // units 1/k0
  Complex refractive_index{1.0, 0.0};        // m = sqrt(eps), Im m >= 0

  double size_parameter() const;             // x = k0 R
};

// Total extinction cross section (units 1/k0^2) from the partial-wave
// series sigma = (2 pi/k0^2) sum_l (2l+1) Re(a_l + b_l), truncated at
// l_max = ceil(x + 4 x^{1/3} + 2). The tail is verified by comparing with
// l_max + 5 terms; MieError when the relative change exceeds 1e-8.
double mie_extinction(const MieInput& input);

// Total extinction cross section of one atomic-cloud realization via the
// optical theorem applied to the forward-scattered wave,
//   sigma = C Im[ sum_a b(a, m_s) e^{-i k0 z_a} ],  C = -3 pi gamma0 / k0^2,
// calibrated so that a single resonantly driven atom gives exactly
// 6 pi / k0^2 (see docs/cross_section_normalization.md).
double microscopic_cross_section(const CloudRealization& realization,
                                 const ExcitationAmplitudes& amplitudes,
                                 int polarization);

}  // namespace cdsim
