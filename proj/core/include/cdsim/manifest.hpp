#pragma once

#include <string>
#include <vector>

namespace cdsim {

inline constexpr const char* kVersion = "0.1.0";

// Bookkeeping written next to every run's outputs: created with status
// "running" before work starts, updated at checkpoints, finalized with
// "complete", "interrupted" or "failed".
struct RunManifest {
  std::string mode;
  std::string config_hash;
  std::string config_text;  // canonical echo
  std::string version = kVersion;
  std::string status = "running";
  long long realizations_target = 0;
  long long realizations_completed = 0;
  long long resamples_total = 0;
  double wall_seconds = 0.0;
  std::vector<double> detunings;
  std::vector<long long> singular_events;  // per detuning
  std::vector<std::string> notes;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace cdsim
