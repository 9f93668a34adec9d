#include "cdsim/cloud.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cdsim/errors.hpp"
#include "cdsim/rng.hpp"

namespace cdsim {

CloudShape CloudShape::cylinder(double length, double radius) {
  if (!(length > 0.0) || !(radius > 0.0))
    throw ConfigError("cylinder requires length > 0 and radius > 0");
  CloudShape s;
  s.shape_ = Cylinder{length, radius};
  return s;
}

CloudShape CloudShape::sphere(double radius) {
  if (!(radius > 0.0)) throw ConfigError("sphere requires radius > 0");
  CloudShape s;
  s.shape_ = Sphere{radius};
  return s;
}

double CloudShape::volume() const {
  if (is_cylinder()) {
    const auto& c = as_cylinder();
    return std::numbers::pi * c.radius * c.radius * c.length;
  }
  const auto& s = as_sphere();
  return 4.0 / 3.0 * std::numbers::pi * s.radius * s.radius * s.radius;
}

double CloudShape::axial_extent() const {
  return is_cylinder() ? as_cylinder().length : 2.0 * as_sphere().radius;
}

double CloudShape::transverse_radius() const {
  return is_cylinder() ? as_cylinder().radius : as_sphere().radius;
}

bool CloudShape::contains(const Eigen::Vector3d& p) const {
  if (is_cylinder()) {
    const auto& c = as_cylinder();
    return p.z() >= 0.0 && p.z() <= c.length &&
           p.x() * p.x() + p.y() * p.y() <= c.radius * c.radius;
  }
  const auto& s = as_sphere();
  return (p - Eigen::Vector3d(0, 0, s.radius)).squaredNorm() <= s.radius * s.radius;
}

long long atom_count(const CloudShape& shape, double density) {
  if (density < 0.0) throw ConfigError("density must be >= 0");
  return std::llround(density * shape.volume());
}

namespace {

// Direct transform samplers (no shape rejection) so the number of RNG draws
// per atom candidate is fixed.
Eigen::Vector3d draw_in_cylinder(const Cylinder& c, std::mt19937_64& rng) {
  const double z = c.length * uniform_unit(rng);
  const double r = c.radius * std::sqrt(uniform_unit(rng));
  const double phi = 2.0 * std::numbers::pi * uniform_unit(rng);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Eigen::Vector3d draw_in_sphere(const Sphere& s, std::mt19937_64& rng) {
  const double r = s.radius * std::cbrt(uniform_unit(rng));
  const double cos_theta = 2.0 * uniform_unit(rng) - 1.0;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * std::numbers::pi * uniform_unit(rng);
  return {r * sin_theta * std::cos(phi), r * sin_theta * std::sin(phi),
          s.radius + r * cos_theta};
}

}  // namespace

CloudRealization sample_realization(const CloudShape& shape, double density,
                                    double exclusion_radius, std::uint64_t master_seed,
                                    std::uint64_t realization_index, std::uint64_t seed_salt,
                                    long long attempt_budget_per_atom) {
  if (exclusion_radius < 0.0) throw ConfigError("exclusion_radius must be >= 0");
  const long long n = atom_count(shape, density);

  CloudRealization out;
  out.realization_seed = derive_seed(master_seed, realization_index, seed_salt);
  out.positions.reserve(static_cast<std::size_t>(n));

  std::mt19937_64 rng(out.realization_seed);
  const double min_dist2 = exclusion_radius * exclusion_radius;
  const long long budget = attempt_budget_per_atom * std::max<long long>(n, 1);

  long long attempts = 0;
  while (static_cast<long long>(out.positions.size()) < n) {
    if (++attempts > budget)
      throw PlacementError("placement failed after " + std::to_string(budget) +
                           " attempts; exclusion radius too large for density");
    const Eigen::Vector3d candidate = shape.is_cylinder()
                                          ? draw_in_cylinder(shape.as_cylinder(), rng)
                                          : draw_in_sphere(shape.as_sphere(), rng);
    bool ok = true;
    if (min_dist2 > 0.0) {
      for (const auto& p : out.positions) {
        if ((p - candidate).squaredNorm() < min_dist2) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.positions.push_back(candidate);
  }
  return out;
}

}  // namespace cdsim
