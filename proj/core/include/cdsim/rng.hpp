#pragma once

#include <cstdint>
#include <random>

namespace cdsim {

// splitmix64 step; used as a seed-mixing hash so that per-realization seeds
// are a pure function of (master_seed, realization_index, salt) and do not
// depend on scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-stream seed. `salt` distinguishes resample attempts of
// the same realization index.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index,
                                 std::uint64_t salt = 0) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (index + 0x9e3779b97f4a7c15ull));
  h = splitmix64(h ^ (salt + 0x7f4a7c159e3779b9ull));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined behaviour of std::uniform_real_distribution so that
// streams are identical across standard libraries.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cdsim
