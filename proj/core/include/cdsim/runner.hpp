#pragma once

#include <atomic>
#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdsim/config.hpp"
#include "cdsim/manifest.hpp"
#include "cdsim/optics.hpp"

namespace cdsim {

// One-pass mean/variance accumulator for scalar ensemble statistics.
struct RunningStat {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningStat& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    m2 += o.m2 + d * d * na * nb / (na + nb);
    mean += d * nb / (na + nb);
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

struct RunContext {
  SimulationConfig config;
  std::string out_dir;
  std::atomic<bool>* cancel = nullptr;  // cooperative interruption (checked per realization)
  std::ostream* log = nullptr;          // optional progress lines
};

struct DispersionRow {
  OpticalConstants constants;
  long long singular_events = 0;
  bool fit_failed = false;
};

struct MieComparisonRow {
  double detuning = 0.0;
  double sigma_microscopic = 0.0;
  double sigma_microscopic_stderr = 0.0;
  double sigma_mie = 0.0;
  double rel_diff = 0.0;
};

struct RunOutcome {
  bool interrupted = false;
  RunManifest manifest;
  std::vector<DispersionRow> dispersion;    // dispersion mode
  std::vector<MieComparisonRow> mie;        // mie-compare mode
};

// Ensemble sweep over the config's detuning grid. Realizations are farmed
// out to workers; per-realization results are merged in realization order,
// so outputs are bit-identical for any worker count. Progress is
// checkpointed to <out>/checkpoint.json and a rerun with the same config
// resumes where it stopped. Writes dispersion.csv and manifest.json.
RunOutcome run_dispersion(const RunContext& ctx);

// Raw z-binned profile at a single detuning; writes profile.csv.
RunOutcome run_profile_dump(const RunContext& ctx, double detuning);

// Pass-through hook: load a profile CSV (columns z_center, re_P, im_P on the
// config's binning grid) and re-emit it through the standard dump path.
void run_profile_inject(const RunContext& ctx, const std::string& inject_path);

// Microscopic vs Debye-Mie extinction cross sections on the detuning grid;
// requires a spherical cloud and a permittivity table. Writes
// mie_compare.csv.
RunOutcome run_mie_compare(const RunContext& ctx, const std::string& permittivity_table);

// Solves the single-atom spectrum on the detuning grid, writes
// single_atom.csv, and returns the maximum relative deviation from the
// analytic Lorentzian (amplitude and cross section).
double run_single_atom(const RunContext& ctx);

struct CostEstimate {
  long long atoms = 0;
  long long dimension = 0;  // 3N
  long long detunings = 0;
  long long systems = 0;
  double matrix_gib = 0.0;        // resident matrices per worker
  double reduction_gflop = 0.0;   // one Hessenberg reduction per realization
  double solve_gflop = 0.0;       // O(n^2) work per detuning
  double est_hours_single_worker = 0.0;
};

CostEstimate estimate_cost(const SimulationConfig& config);
void print_cost_estimate(std::ostream& os, const SimulationConfig& config);

struct PermittivityEntry {
  double detuning = 0.0;
  Complex eps{1.0, 0.0};
};

// Parses a CSV containing at least the columns delta, eps_re, eps_im
// (dispersion.csv qualifies).
std::vector<PermittivityEntry> read_permittivity_table(const std::string& path);

// Worker count: config value, else the CDSIM_WORKERS environment variable,
// else hardware concurrency.
int resolve_worker_count(const SimulationConfig& config);

}  // namespace cdsim
