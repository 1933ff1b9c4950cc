#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvmpr/units.hpp"

namespace nvmpr {

using CVec3 = Eigen::Vector3cd;

// Regular lattice of sample points, x index fastest.
struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double dx = 1.0, dy = 1.0, dz = 1.0;  // m
  Vec3 origin = Vec3::Zero();           // position of (0, 0, 0), m

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
  }
  Vec3 position(int i, int j, int k) const { return origin + Vec3(i * dx, j * dy, k * dz); }
};

struct FieldMap {
  GridSpec grid;
  std::vector<CVec3> B_c;           // T, arbitrary normalization
  std::vector<std::uint8_t> mask;   // 1 inside the diamond

  void validate() const;
};

struct EnsembleMap {
  std::vector<double> n_S;  // cm^-3
  std::vector<double> P_z;
  std::vector<double> phi;  // angle between NV axis and local B_c, rad

  void validate(std::size_t points) const;

  // Constant density and polarization; phi from a single NV axis.
  static EnsembleMap uniform(const FieldMap& field, double n_S, double P_z, const Vec3& nv_axis);
};

// Polarization assumed throughout the diamond when none is given.
inline constexpr double kDefaultPolarization = 0.15;

// g^2 = gamma_e^2 mu0 hbar omega_c int_diamond n_S P_z |B_c|^2 sin^2 phi / int_all |B_c|^2.
// Each lattice cell contributes its volume times the corner-averaged
// integrand, i.e. the cell-midpoint value of the trilinear interpolant.
// Returns g in rad/s; throws InvalidField if the field energy vanishes.
double coupling_g(const FieldMap& field, const EnsembleMap& ensemble, double omega_c,
                  const PhysicalConstants& constants = {});

struct RefineReport {
  double g_full = 0.0;
  double g_half = 0.0;
  double rel_diff = 0.0;  // |g_full - g_half| / g_full
  std::optional<double> g_quarter;
  std::optional<double> observed_order;  // log2 of successive difference ratio
  bool slow_convergence = false;         // observed order below 1.5
};

// Compares g on the full lattice with every-other-point decimations.
// Needs nx, ny, nz odd (or 1) and at least 3 points along some axis.
RefineReport refine_check(const FieldMap& field, const EnsembleMap& ensemble, double omega_c,
                          const PhysicalConstants& constants = {});

FieldMap decimate(const FieldMap& field);
EnsembleMap decimate(const EnsembleMap& ensemble, const GridSpec& grid);

// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> values);

// Plain-text field map:
//   # comment lines
//   nx ny nz dx dy dz
//   x y z Bx By Bz mask        (nx*ny*nz rows, x fastest, SI units)
FieldMap read_field_map(std::istream& in);
FieldMap read_field_map(const std::string& path);
void write_field_map(std::ostream& out, const FieldMap& field);

// A spiral-resonator stand-in: field of a magnetic dipole along z softened
// over the coil radius, sampled in a box around the coil, with a diamond
// slab resting on top of it.
struct SyntheticSpiralSpec {
  int points_per_axis = 41;       // odd, so two decimation levels are available with 41
  double half_width = 3e-3;       // box half extent in x and y, m
  double half_height = 2e-3;      // box half extent in z, m
  double coil_radius = 0.7e-3;    // m
  double diamond_half_width = 1.5e-3;
  double diamond_thickness = 0.5e-3;
};
FieldMap synthetic_spiral_map(const SyntheticSpiralSpec& spec = {});

}  // namespace nvmpr
