#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdsim/cloud.hpp"
#include "cdsim/dispersion.hpp"
#include "cdsim/profile.hpp"

namespace cdsim {

// Full description of a run, read from a sectioned key = value file.
// Defaults marked (*) are derived from the geometry when not set explicitly:
// averaging_radius = R/2, fit window = [2, L-2].
//
//   [cloud]    shape = cylinder|sphere, length, radius, density,
//              exclusion_radius
//   [drive]    polarization, detuning_start, detuning_stop, detuning_step
//   [ensemble] realizations, master_seed, workers
//   [binning]  bin_width, averaging_radius (*)
//   [fit]      window_min (*), window_max (*), weighted
//   [output]   directory
struct SimulationConfig {
  CloudShape shape = CloudShape::cylinder(10.0, 20.0);
  double density = 0.0;
  double exclusion_radius = 0.0;

  int polarization = +1;
  double detuning_start = 0.0;
  double detuning_stop = 0.0;
  double detuning_step = 0.0;

  long long realizations = 1;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: CDSIM_WORKERS env var, then hardware concurrency

  BinningSpec binning;  // z_max always tracks the shape's axial extent
  FitWindow window;
  bool weighted_fit = true;

  std::string output_dir = "out";

  std::vector<double> detuning_grid() const;
  void validate() const;
};

SimulationConfig parse_config_file(const std::string& path);
SimulationConfig parse_config_text(const std::string& text);

// Canonical serialization of the physics-relevant fields (worker count and
// output directory excluded); its FNV-1a hash identifies a run for resume
// checks and is embedded in output headers.
std::string canonical_config_text(const SimulationConfig& config);
std::string config_hash_hex(const SimulationConfig& config);

}  // namespace cdsim
