#include "cdsim/solver.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include "cdsim/errors.hpp"
#include "cdsim/units.hpp"

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);
extern "C" void cblas_zgemv(int order, int trans, int m, int n, const void* alpha,
                            const void* a, int lda, const void* x, int incx,
                            const void* beta, void* y, int incy);

namespace cdsim {

namespace {

// BLAS-level threading is pinned to one thread: parallelism lives at the
// realization level and results must not depend on the worker count.
void ensure_single_threaded_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

constexpr int kCblasColMajor = 102;
constexpr int kCblasNoTrans = 111;

Eigen::VectorXcd multiply_shifted(const Eigen::MatrixXcd& a0, double shift,
                                  const Eigen::VectorXcd& x) {
  const int n = static_cast<int>(a0.rows());
  Eigen::VectorXcd y(n);
  const Complex one(1.0, 0.0), zero(0.0, 0.0);
  cblas_zgemv(kCblasColMajor, kCblasNoTrans, n, n, &one, a0.data(), n, x.data(), 1, &zero,
              y.data(), 1);
  y += shift * x;
  return y;
}

double relative_residual(const Eigen::MatrixXcd& a0, double shift,
                         const Eigen::VectorXcd& b, const Eigen::VectorXcd& rhs) {
  return (multiply_shifted(a0, shift, b) - rhs).norm() / rhs.norm();
}

}  // namespace

LinearSystem assemble_system(const CloudRealization& realization, const DriveField& drive) {
  const int n_atoms = realization.atom_count();
  if (n_atoms < 1) throw Error("assemble_system requires at least one atom");
  if (drive.polarization < -1 || drive.polarization > 1)
    throw Error("drive polarization must be -1, 0 or +1");

  const int n = 3 * n_atoms;
  LinearSystem sys;
  sys.polarization = drive.polarization;
  sys.matrix.setZero(n, n);
  sys.rhs.setZero(n);

  const Complex diag = Complex(drive.detuning, 0.0) - self_energy();
  for (int a = 0; a < n_atoms; ++a)
    for (int m = 0; m < 3; ++m) sys.matrix(3 * a + m, 3 * a + m) = diag;

  // B(r) = B(-r) entrywise (the kernel is even in r), so one block serves
  // both atom orders.
  for (int a = 0; a < n_atoms; ++a) {
    for (int b = a + 1; b < n_atoms; ++b) {
      const Eigen::Matrix3cd blk = -zeeman_block(realization.positions[a] -
                                                 realization.positions[b]);
      sys.matrix.block<3, 3>(3 * a, 3 * b) = blk;
      sys.matrix.block<3, 3>(3 * b, 3 * a) = blk;
    }
  }

  const int ms_row = zeeman_index(drive.polarization);
  for (int a = 0; a < n_atoms; ++a) {
    const double z = realization.positions[a].z();
    sys.rhs(3 * a + ms_row) = std::exp(Complex(0.0, units::k0 * z));
  }
  return sys;
}

ExcitationAmplitudes solve_amplitudes(const LinearSystem& system) {
  ensure_single_threaded_blas();
  const int n = static_cast<int>(system.matrix.rows());
  if (system.matrix.cols() != n || system.rhs.size() != n)
    throw Error("solve_amplitudes: shape mismatch");

  Eigen::MatrixXcd lu = system.matrix;
  Eigen::VectorXcd b = system.rhs;
  std::vector<lapack_int> ipiv(n);
  const lapack_int info = LAPACKE_zgesv(LAPACK_COL_MAJOR, n, 1, lu.data(), n, ipiv.data(),
                                        b.data(), n);
  if (info != 0)
    throw SingularMatrixError("zgesv failed with info=" + std::to_string(info));

  ExcitationAmplitudes out;
  out.b = std::move(b);
  out.polarization = system.polarization;
  out.residual = (system.matrix * out.b - system.rhs).norm() / system.rhs.norm();
  if (!std::isfinite(out.residual) || out.residual > kResidualBound)
    throw SingularMatrixError("solve residual " + std::to_string(out.residual) +
                              " exceeds bound");
  return out;
}

MultiDetuningSolver::MultiDetuningSolver(const CloudRealization& realization,
                                         int polarization)
    : polarization_(polarization) {
  ensure_single_threaded_blas();
  LinearSystem sys = assemble_system(realization, DriveField{0.0, polarization});
  n_ = static_cast<int>(sys.matrix.rows());
  coupling_ = std::move(sys.matrix);
  rhs_ = std::move(sys.rhs);

  hessenberg_ = coupling_;
  tau_.resize(std::max(n_ - 1, 1));
  lapack_int info = LAPACKE_zgehrd(LAPACK_COL_MAJOR, n_, 1, n_, hessenberg_.data(), n_,
                                   tau_.data());
  if (info != 0)
    throw SingularMatrixError("zgehrd failed with info=" + std::to_string(info));

  qh_rhs_ = rhs_;
  info = LAPACKE_zunmhr(LAPACK_COL_MAJOR, 'L', 'C', n_, 1, 1, n_, hessenberg_.data(), n_,
                        tau_.data(), qh_rhs_.data(), n_);
  if (info != 0)
    throw SingularMatrixError("zunmhr failed with info=" + std::to_string(info));

  r_.resize(n_, n_);
  y_.resize(n_);
  work_.resize(n_);
  multiplier_.resize(n_);
  swapped_.resize(n_);
}

ExcitationAmplitudes MultiDetuningSolver::solve(double detuning) {
  const int n = n_;
  const Complex shift(detuning, 0.0);

  // Left-looking Gaussian elimination with partial pivoting of the shifted
  // Hessenberg matrix H + Delta I. Transformation j acts on rows j, j+1
  // only, so each column is eliminated in one cache-resident sweep and H
  // itself stays untouched for reuse at the next detuning.
  y_ = qh_rhs_;
  for (int c = 0; c < n; ++c) {
    Complex* buf = r_.data() + static_cast<std::ptrdiff_t>(c) * n;
    const Complex* hcol = hessenberg_.data() + static_cast<std::ptrdiff_t>(c) * n;
    const int top = std::min(c + 1, n - 1);  // lowest nonzero row of column c
    for (int i = 0; i <= top; ++i) buf[i] = hcol[i];
    buf[c] += shift;
    for (int j = 0; j < c; ++j) {
      if (swapped_[j]) std::swap(buf[j], buf[j + 1]);
      buf[j + 1] -= multiplier_[j] * buf[j];
    }
    if (c < n - 1) {
      const bool swap = std::abs(buf[c + 1]) > std::abs(buf[c]);
      swapped_[c] = swap;
      if (swap) {
        std::swap(buf[c], buf[c + 1]);
        std::swap(y_[c], y_[c + 1]);
      }
      if (buf[c] == Complex(0.0, 0.0))
        throw SingularMatrixError("shifted Hessenberg solve hit a zero pivot");
      multiplier_[c] = buf[c + 1] / buf[c];
      y_[c + 1] -= multiplier_[c] * y_[c];
    } else if (buf[c] == Complex(0.0, 0.0)) {
      throw SingularMatrixError("shifted Hessenberg solve hit a zero pivot");
    }
  }

  // Back substitution, column oriented.
  work_ = y_;
  for (int c = n - 1; c >= 0; --c) {
    const Complex* rcol = r_.data() + static_cast<std::ptrdiff_t>(c) * n;
    const Complex xc = work_[c] / rcol[c];
    work_[c] = xc;
    for (int i = 0; i < c; ++i) work_[i] -= xc * rcol[i];
  }

  ExcitationAmplitudes out;
  out.b = work_;
  const lapack_int info = LAPACKE_zunmhr(LAPACK_COL_MAJOR, 'L', 'N', n, 1, 1, n,
                                         hessenberg_.data(), n, tau_.data(), out.b.data(),
                                         n);
  if (info != 0)
    throw SingularMatrixError("zunmhr failed with info=" + std::to_string(info));

  out.polarization = polarization_;
  out.residual = relative_residual(coupling_, detuning, out.b, rhs_);
  if (!std::isfinite(out.residual) || out.residual > kResidualBound)
    throw SingularMatrixError("shifted solve residual " + std::to_string(out.residual) +
                              " exceeds bound");
  return out;
}

}  // namespace cdsim
