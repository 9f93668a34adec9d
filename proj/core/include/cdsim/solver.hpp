#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "cdsim/cloud.hpp"
#include "cdsim/green.hpp"

namespace cdsim {

// Monochromatic plane-wave drive propagating along +z with circular
// polarization component m_s, phase factor e^{i k0 z}, unit amplitude. The
// detuning is Delta = omega_s - omega_a in linewidth units.
struct DriveField {
  double detuning = 0.0;
  int polarization = +1;  // m_s in {-1, 0, +1}
};

// Steady-state excitation amplitudes, one complex value per (atom, Zeeman
// projection); index 3*a + (m+1).
struct ExcitationAmplitudes {
  Eigen::VectorXcd b;
  int polarization = +1;
  double residual = 0.0;  // relative 2-norm residual of the solve
};

struct LinearSystem {
  Eigen::MatrixXcd matrix;  // 3N x 3N
  Eigen::VectorXcd rhs;     // 3N
  int polarization = +1;
};

// Relative residual bound every solve must satisfy.
inline constexpr double kResidualBound = 1e-8;

// Builds the steady-state system
//   [(Delta + i/2) delta_{ab} delta_{mm'} - B(r_a - r_b)(m, m')] b = rhs,
// rhs[(a,m)] = delta_{m,m_s} e^{i k0 z_a}.
LinearSystem assemble_system(const CloudRealization& realization, const DriveField& drive);

// Dense LU solve with partial pivoting; verifies the residual bound and
// throws SingularMatrixError on failure.
ExcitationAmplitudes solve_amplitudes(const LinearSystem& system);

// Solves the same system for many detunings of one realization. The matrix
// depends on the detuning only through its diagonal, A(Delta) = A(0) +
// Delta I, so the system is reduced to Hessenberg form once (O(n^3)) and
// each detuning costs a single O(n^2) shifted solve. Every solution is
// verified against the same residual bound as the direct path.
class MultiDetuningSolver {
 public:
  MultiDetuningSolver(const CloudRealization& realization, int polarization);

  ExcitationAmplitudes solve(double detuning);

  int dimension() const { return n_; }

 private:
  int n_ = 0;
  int polarization_ = +1;
  Eigen::MatrixXcd coupling_;   // A(0), kept for residual verification
  Eigen::MatrixXcd hessenberg_; // zgehrd output: H + reflectors below subdiagonal
  Eigen::VectorXcd tau_;
  Eigen::VectorXcd rhs_;
  Eigen::VectorXcd qh_rhs_;     // Q^H rhs
  // per-solve scratch, allocated once
  Eigen::MatrixXcd r_;
  Eigen::VectorXcd y_;
  Eigen::VectorXcd work_;
  std::vector<Complex> multiplier_;
  std::vector<char> swapped_;
};

}  // namespace cdsim
