#include "cdsim/profile.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "cdsim/errors.hpp"

namespace cdsim {

int BinningSpec::bin_count() const {
  return static_cast<int>(std::ceil(z_max / bin_width - 1e-9));
}

double BinningSpec::bin_center(int i) const { return (i + 0.5) * bin_width; }

void BinningSpec::validate() const {
  if (!(bin_width > 0.0) || !(z_max > 0.0) || bin_width >= z_max)
    throw ConfigError("binning requires 0 < bin_width < z_max");
  if (!(averaging_radius > 0.0))
    throw ConfigError("averaging_radius must be > 0");
}

SingleRealizationProfile bin_polarization(const CloudRealization& realization,
                                          const ExcitationAmplitudes& amplitudes,
                                          const BinningSpec& spec) {
  spec.validate();
  if (amplitudes.b.size() != 3 * realization.atom_count())
    throw Error("amplitudes do not belong to this realization");

  const int nbins = spec.bin_count();
  SingleRealizationProfile out;
  out.spec = spec;
  out.polarization.assign(nbins, Complex(0.0, 0.0));
  out.atoms.assign(nbins, 0);

  const int ms_row = zeeman_index(amplitudes.polarization);
  const double r2_max = spec.averaging_radius * spec.averaging_radius;
  for (int a = 0; a < realization.atom_count(); ++a) {
    const auto& p = realization.positions[a];
    if (p.x() * p.x() + p.y() * p.y() > r2_max) continue;
    if (p.z() < 0.0 || p.z() > spec.z_max) continue;
    const int bin = std::min(static_cast<int>(p.z() / spec.bin_width), nbins - 1);
    out.polarization[bin] += amplitudes.b(3 * a + ms_row);
    out.atoms[bin] += 1;
  }

  const double bin_volume =
      std::numbers::pi * r2_max * spec.bin_width;
  for (auto& p : out.polarization) p /= bin_volume;
  return out;
}

PolarizationProfile::PolarizationProfile(const BinningSpec& spec) : spec_(spec) {
  spec.validate();
  bins_.resize(spec_.bin_count());
}

void PolarizationProfile::accumulate(const SingleRealizationProfile& single) {
  if (!(single.spec == spec_)) throw Error("binning spec mismatch in accumulate");
  ++realizations_;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (single.atoms[i] == 0) continue;  // empty bins stay data-free
    auto& b = bins_[i];
    b.atoms += single.atoms[i];
    b.n += 1;
    const double re = single.polarization[i].real();
    const double im = single.polarization[i].imag();
    const double d_re = re - b.mean_re;
    const double d_im = im - b.mean_im;
    b.mean_re += d_re / static_cast<double>(b.n);
    b.mean_im += d_im / static_cast<double>(b.n);
    const double d2_re = re - b.mean_re;
    const double d2_im = im - b.mean_im;
    b.m2_re += d_re * d2_re;
    b.m2_im += d_im * d2_im;
    b.c_reim += d_re * d2_im;
  }
}

void PolarizationProfile::merge(const PolarizationProfile& other) {
  if (!(other.spec_ == spec_)) throw Error("binning spec mismatch in merge");
  realizations_ += other.realizations_;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    auto& a = bins_[i];
    const auto& b = other.bins_[i];
    if (b.n == 0) continue;
    if (a.n == 0) {
      a = b;
      continue;
    }
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    const double nt = na + nb;
    const double d_re = b.mean_re - a.mean_re;
    const double d_im = b.mean_im - a.mean_im;
    a.m2_re += b.m2_re + d_re * d_re * na * nb / nt;
    a.m2_im += b.m2_im + d_im * d_im * na * nb / nt;
    a.c_reim += b.c_reim + d_re * d_im * na * nb / nt;
    a.mean_re += d_re * nb / nt;
    a.mean_im += d_im * nb / nt;
    a.atoms += b.atoms;
    a.n += static_cast<long long>(nb);
  }
}

PolarizationProfile::BinStats PolarizationProfile::bin(int i) const {
  const auto& b = bins_.at(static_cast<std::size_t>(i));
  BinStats s;
  s.z_center = spec_.bin_center(i);
  s.atoms = b.atoms;
  s.samples = b.n;
  s.mean = Complex(b.mean_re, b.mean_im);
  if (b.n > 1) {
    const double dof = static_cast<double>(b.n - 1);
    s.var_re = b.m2_re / dof;
    s.var_im = b.m2_im / dof;
    s.cov_reim = b.c_reim / dof;
    s.stderr_re = std::sqrt(s.var_re / static_cast<double>(b.n));
    s.stderr_im = std::sqrt(s.var_im / static_cast<double>(b.n));
  }
  return s;
}

void PolarizationProfile::restore(const BinningSpec& spec, std::vector<RawBin> bins,
                                  long long realizations) {
  spec.validate();
  if (static_cast<int>(bins.size()) != spec.bin_count())
    throw Error("checkpoint bin count does not match binning spec");
  spec_ = spec;
  bins_ = std::move(bins);
  realizations_ = realizations;
}

void write_profile_csv(std::ostream& os, const PolarizationProfile& profile) {
  os << "z_center,re_P,im_P,abs_P,arg_P,count,stderr_re,stderr_im\n";
  char line[256];
  for (int i = 0; i < profile.bin_count(); ++i) {
    const auto s = profile.bin(i);
    const double nan = std::nan("");
    const bool empty = s.samples == 0;
    const double re = empty ? nan : s.mean.real();
    const double im = empty ? nan : s.mean.imag();
    std::snprintf(line, sizeof line,
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%lld,%.12g,%.12g\n", s.z_center, re, im,
                  empty ? nan : std::abs(s.mean), empty ? nan : std::arg(s.mean), s.atoms,
                  empty ? nan : s.stderr_re, empty ? nan : s.stderr_im);
    os << line;
  }
}

}  // namespace cdsim
