#include "cdsim/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "cdsim/errors.hpp"

namespace cdsim {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w) {
  const std::size_t n = x.size();
  if (y.size() != n || (!w.empty() && w.size() != n))
    throw FitError("fit_line: size mismatch");
  if (n < 2) throw FitError("fit_line: needs at least two points");
  const bool weighted = !w.empty();

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    sw += wi;
    swx += wi * x[i];
    swy += wi * y[i];
  }
  const double xbar = swx / sw, ybar = swy / sw;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    const double dx = x[i] - xbar, dy = y[i] - ybar;
    sxx += wi * dx * dx;
    sxy += wi * dx * dy;
    syy += wi * dy * dy;
  }
  if (sxx <= 0.0) throw FitError("fit_line: degenerate window, all abscissae equal");

  LineFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += wi * r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;

  if (weighted) {
    fit.slope_err = std::sqrt(1.0 / sxx);
  } else {
    const double sigma2 = n > 2 ? ss_res / static_cast<double>(n - 2) : 0.0;
    fit.slope_err = std::sqrt(sigma2 / sxx);
  }
  return fit;
}

namespace {

struct WindowedBins {
  std::vector<double> z;
  std::vector<Complex> mean;
  std::vector<double> var_re, var_im, cov;  // of the mean
};

// weighted_only: keep just the bins with an estimable variance (>= 2
// samples); the others carry no usable weight. Falls back to the full
// nonempty set when that leaves fewer than 3 bins.
WindowedBins collect_bins(const PolarizationProfile& profile, const FitWindow& window,
                          bool weighted_only) {
  if (!(window.z_min < window.z_max)) throw FitError("fit window is empty");
  WindowedBins out;
  for (int i = 0; i < profile.bin_count(); ++i) {
    const auto s = profile.bin(i);
    if (s.z_center < window.z_min || s.z_center > window.z_max) continue;
    if (s.samples == 0) continue;               // empty bins are skipped, never zero
    if (std::abs(s.mean) == 0.0) continue;      // log/phase undefined
    if (weighted_only && (s.samples < 2 || !(s.var_re > 0.0) || !(s.var_im > 0.0)))
      continue;
    const double n = static_cast<double>(s.samples);
    out.z.push_back(s.z_center);
    out.mean.push_back(s.mean);
    out.var_re.push_back(s.var_re / n);
    out.var_im.push_back(s.var_im / n);
    out.cov.push_back(s.cov_reim / n);
  }
  if (weighted_only && out.z.size() < 3) return collect_bins(profile, window, false);
  if (out.z.size() < 3)
    throw FitError("insufficient bins: fewer than 3 usable bins in the fit window");
  return out;
}

double wrap_step(double d) {
  double step = std::remainder(d, 2.0 * std::numbers::pi);
  if (step <= -std::numbers::pi) step += 2.0 * std::numbers::pi;
  return step;
}

}  // namespace

UnwrappedPhase unwrap_phase(const PolarizationProfile& profile, const FitWindow& window) {
  const WindowedBins bins = collect_bins(profile, window);
  UnwrappedPhase out;
  out.z = bins.z;
  out.phase.resize(bins.z.size());
  out.phase[0] = std::arg(bins.mean[0]);
  for (std::size_t i = 1; i < bins.mean.size(); ++i) {
    const double step = wrap_step(std::arg(bins.mean[i]) - out.phase[i - 1]);
    if (std::abs(step) > 0.5 * std::numbers::pi) out.ambiguous = true;
    out.phase[i] = out.phase[i - 1] + step;
  }
  return out;
}

ComplexWavenumber fit_wavenumber(const PolarizationProfile& profile, const FitWindow& window,
                                 bool weighted) {
  const WindowedBins bins = collect_bins(profile, window);
  const std::size_t n = bins.z.size();
  const bool use_weights = weighted && bins.variances_usable;

  std::vector<double> log_abs(n), phase(n);
  std::vector<double> w_amp, w_phase;
  if (use_weights) {
    w_amp.resize(n);
    w_phase.resize(n);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double u = bins.mean[i].real(), v = bins.mean[i].imag();
    const double abs2 = u * u + v * v;
    log_abs[i] = 0.5 * std::log(abs2);
    if (use_weights) {
      // delta-method variances of ln|P| and arg P from the mean's covariance
      const double var_abs2 =
          (u * u * bins.var_re[i] + v * v * bins.var_im[i] + 2.0 * u * v * bins.cov[i]);
      const double var_log = var_abs2 / (abs2 * abs2);
      const double var_phase =
          (v * v * bins.var_re[i] + u * u * bins.var_im[i] - 2.0 * u * v * bins.cov[i]) /
          (abs2 * abs2);
      w_amp[i] = var_log > 0.0 ? 1.0 / var_log : 0.0;
      w_phase[i] = var_phase > 0.0 ? 1.0 / var_phase : 0.0;
    }
  }

  UnwrappedPhase unwrapped = unwrap_phase(profile, window);
  ComplexWavenumber out;
  const LineFit amp_fit = fit_line(bins.z, log_abs, w_amp);
  const LineFit phase_fit = fit_line(unwrapped.z, unwrapped.phase, w_phase);
  out.k_im = -amp_fit.slope;
  out.k_im_err = amp_fit.slope_err;
  out.k_re = phase_fit.slope;
  out.k_re_err = phase_fit.slope_err;
  out.r2_amplitude = amp_fit.r2;
  out.r2_phase = phase_fit.r2;
  out.bins_used = static_cast<int>(n);
  return out;
}

}  // namespace cdsim
