#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>
#include <vector>

namespace cdsim {

// Cloud geometries. Both shapes occupy z in [0, axial_extent()]: the
// cylinder axis is the z-axis with its front face at z = 0, the sphere is
// centered at (0, 0, R). The drive propagates along +z.
struct Cylinder {
  double length;
  double radius;
};

struct Sphere {
  double radius;
};

class CloudShape {
 public:
  static CloudShape cylinder(double length, double radius);
  static CloudShape sphere(double radius);

  bool is_cylinder() const { return std::holds_alternative<Cylinder>(shape_); }
  bool is_sphere() const { return std::holds_alternative<Sphere>(shape_); }
  const Cylinder& as_cylinder() const { return std::get<Cylinder>(shape_); }
  const Sphere& as_sphere() const { return std::get<Sphere>(shape_); }

  double volume() const;
  double axial_extent() const;      // L for cylinder, 2R for sphere
  double transverse_radius() const; // R for both
  bool contains(const Eigen::Vector3d& p) const;

 private:
  std::variant<Cylinder, Sphere> shape_;
};

// One random draw of atom positions, uniform over the shape, with all
// pairwise distances >= the exclusion radius used to draw it.
struct CloudRealization {
  std::vector<Eigen::Vector3d> positions;
  std::uint64_t realization_seed = 0;

  int atom_count() const { return static_cast<int>(positions.size()); }
};

// N = round(density * volume).
long long atom_count(const CloudShape& shape, double density);

// Uniform rejection sampling with a minimum pairwise distance. Pure function
// of its arguments: the per-realization seed is derive_seed(master_seed,
// realization_index, seed_salt). Throws PlacementError when more than
// attempt_budget_per_atom * N candidate draws are consumed, which signals an
// exclusion radius too large for the requested density.
CloudRealization sample_realization(const CloudShape& shape, double density,
                                    double exclusion_radius, std::uint64_t master_seed,
                                    std::uint64_t realization_index,
                                    std::uint64_t seed_salt = 0,
                                    long long attempt_budget_per_atom = 1000);

}  // namespace cdsim
