#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "cdsim/cloud.hpp"
#include "cdsim/green.hpp"
#include "cdsim/solver.hpp"

namespace cdsim {

// Axial binning of the polarization: bins of width bin_width covering
// z in [0, z_max], restricted to atoms with transverse radius <=
// averaging_radius.
struct BinningSpec {
  double bin_width = 0.25;
  double averaging_radius = 0.0;
  double z_max = 0.0;

  int bin_count() const;
  double bin_center(int i) const;
  void validate() const;

  bool operator==(const BinningSpec&) const = default;
};

// One realization's binned polarization: per bin the m_s component of the
// summed amplitudes divided by the bin volume pi r_avg^2 dz. Bins without
// atoms are empty (count 0), not zero.
struct SingleRealizationProfile {
  BinningSpec spec;
  std::vector<Complex> polarization;
  std::vector<long long> atoms;
};

SingleRealizationProfile bin_polarization(const CloudRealization& realization,
                                          const ExcitationAmplitudes& amplitudes,
                                          const BinningSpec& spec);

// Ensemble accumulator: per-bin running mean and covariance of (Re P, Im P)
// over realizations, in one numerically stable pass. Empty bins of a
// realization contribute no sample. Accumulators merge associatively so
// partial results from workers can be combined; the reduction used by the
// runner is ordered, which makes outputs independent of the worker count.
class PolarizationProfile {
 public:
  PolarizationProfile() = default;
  explicit PolarizationProfile(const BinningSpec& spec);

  void accumulate(const SingleRealizationProfile& single);
  void merge(const PolarizationProfile& other);

  struct BinStats {
    double z_center = 0.0;
    long long atoms = 0;     // atom-realizations that landed in the bin
    long long samples = 0;   // realizations with a nonempty bin
    Complex mean{0.0, 0.0};
    double var_re = 0.0;     // sample variances over realizations
    double var_im = 0.0;
    double cov_reim = 0.0;
    double stderr_re = 0.0;  // standard errors of the mean
    double stderr_im = 0.0;
  };

  BinStats bin(int i) const;
  int bin_count() const { return spec_.bin_count(); }
  const BinningSpec& spec() const { return spec_; }
  long long realizations() const { return realizations_; }

  struct RawBin {
    long long atoms = 0;
    long long n = 0;
    double mean_re = 0.0, mean_im = 0.0;
    double m2_re = 0.0, m2_im = 0.0, c_reim = 0.0;
  };
  // Exact accumulator state, used by the checkpoint codec.
  const std::vector<RawBin>& raw() const { return bins_; }
  void restore(const BinningSpec& spec, std::vector<RawBin> bins, long long realizations);

 private:
  BinningSpec spec_;
  long long realizations_ = 0;
  std::vector<RawBin> bins_;
};

// CSV dump with columns
//   z_center,re_P,im_P,abs_P,arg_P,count,stderr_re,stderr_im
// (nan statistics for bins that never received an atom).
void write_profile_csv(std::ostream& os, const PolarizationProfile& profile);

}  // namespace cdsim
