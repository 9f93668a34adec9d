#pragma once

#include <stdexcept>
#include <string>

namespace cdsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration (bad file, unknown key, bad value).
struct ConfigError : Error {
  using Error::Error;
};

// Rejection sampling could not place all atoms within the attempt budget.
struct PlacementError : Error {
  using Error::Error;
};

// Linear system is singular or the solution failed the residual bound.
struct SingularMatrixError : Error {
  using Error::Error;
};

// Fit preconditions violated: too few usable bins, degenerate window.
struct FitError : Error {
  using Error::Error;
};

// Mie partial-wave series failed its tail-convergence test.
struct MieError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace cdsim
