#pragma once

#include <vector>

#include "cdsim/profile.hpp"

namespace cdsim {

// Axial fit window; boundary layers of the cloud (about 1.5-2 length units
// at each face) should be excluded.
struct FitWindow {
  double z_min = 0.0;
  double z_max = 0.0;
};

// Weighted least-squares line y = intercept + slope * x. Empty weights give
// the unweighted fit. With inverse-variance weights the slope error comes
// from the weight matrix; unweighted errors are residual-based.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double r2 = 0.0;
  int points = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w = {});

struct UnwrappedPhase {
  std::vector<double> z;
  std::vector<double> phase;
  // raised when some raw step exceeded pi/2; unwrapping may be unreliable
  bool ambiguous = false;
};

// Per-bin mean phase inside the window with 2*pi jumps removed: each step is
// mapped into (-pi, pi] of the previous bin. Skips empty bins. Throws
// FitError with fewer than 3 usable bins.
UnwrappedPhase unwrap_phase(const PolarizationProfile& profile, const FitWindow& window);

struct ComplexWavenumber {
  double k_re = 0.0;  // units k0
  double k_im = 0.0;
  double k_re_err = 0.0;
  double k_im_err = 0.0;
  double r2_phase = 0.0;
  double r2_amplitude = 0.0;
  int bins_used = 0;
};

// Fits ln|P(z)| and the unwrapped phase to straight lines:
// P(z) = P0 exp(i (k' + i k'') z), k' = phase slope, k'' = -log-amplitude
// slope. Weights are propagated per-bin variances of the ensemble mean; the
// fit falls back to the unweighted form when any used bin lacks a variance
// estimate (fewer than two samples) or when weighted == false.
ComplexWavenumber fit_wavenumber(const PolarizationProfile& profile, const FitWindow& window,
                                 bool weighted = true);

}  // namespace cdsim
