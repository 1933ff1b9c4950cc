#pragma once

#include <array>
#include <numbers>

#include <Eigen/Dense>

namespace nvmpr {

using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Internal frequencies are angular (rad/s), fields are tesla. Conversions
// happen only when reading configuration or writing results.
namespace units {

inline constexpr double kRadPerMhz = kTwoPi * 1e6;

constexpr double mhz_to_rad(double f_mhz) { return f_mhz * kRadPerMhz; }
constexpr double rad_to_mhz(double omega) { return omega / kRadPerMhz; }
constexpr double hz_to_rad(double f_hz) { return f_hz * kTwoPi; }
constexpr double rad_to_hz(double omega) { return omega / kTwoPi; }
constexpr double mt_to_tesla(double b_mt) { return b_mt * 1e-3; }
constexpr double tesla_to_mt(double b) { return b * 1e3; }
constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
constexpr double per_cm3_to_per_m3(double n) { return n * 1e6; }
constexpr double per_m3_to_per_cm3(double n) { return n * 1e-6; }

}  // namespace units

class PhysicalConstants {
 public:
  // gamma_e/2pi = 28.03 GHz/T, CODATA 2018 mu0 and hbar.
  PhysicalConstants() = default;
  PhysicalConstants(double gamma_e, double mu0, double hbar);

  double gamma_e() const noexcept { return gamma_e_; }  // rad/s per T
  double mu0() const noexcept { return mu0_; }          // T m / A
  double hbar() const noexcept { return hbar_; }        // J s

 private:
  double gamma_e_ = kTwoPi * 28.03e9;
  double mu0_ = 1.25663706212e-6;
  double hbar_ = 1.054571817e-34;
};

namespace lattice {

// The four <111> bond directions, [111] first.
std::array<Vec3, 4> nv_axes();

// Unit vector of a crystal direction given in Miller indices.
Vec3 direction(double h, double k, double l);

// Orthonormal (x, y, z) frame with z along `axis`. The x axis is the
// component of `hint` perpendicular to `axis`; a zero or parallel hint
// falls back to a fixed reference.
struct Frame {
  Vec3 x, y, z;
};
Frame local_frame(const Vec3& axis, const Vec3& hint = Vec3::Zero());

// Field of magnitude `b` tilted by `tilt` radians from `axis` toward `toward`.
Vec3 tilted(const Vec3& axis, const Vec3& toward, double tilt, double b);

}  // namespace lattice

}  // namespace nvmpr

namespace nvmpr::lattice {
// Carbon atom density of diamond, cm^-3; converts fractional concentrations to densities.
inline constexpr double kAtomDensity = 1.8e23;
}  // namespace nvmpr::lattice
