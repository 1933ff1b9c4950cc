#include "nvmpr/units.hpp"

#include <cmath>

#include "nvmpr/errors.hpp"

namespace nvmpr {

PhysicalConstants::PhysicalConstants(double gamma_e, double mu0, double hbar)
    : gamma_e_(gamma_e), mu0_(mu0), hbar_(hbar) {
  if (!(gamma_e > 0.0) || !(mu0 > 0.0) || !(hbar > 0.0)) {
    throw InvalidParameter("physical constants must be positive");
  }
}

namespace lattice {

Vec3 direction(double h, double k, double l) {
  Vec3 v(h, k, l);
  const double n = v.norm();
  if (n == 0.0) throw InvalidParameter("zero lattice direction");
  return v / n;
}

std::array<Vec3, 4> nv_axes() {
  return {direction(1, 1, 1), direction(-1, 1, 1), direction(1, -1, 1), direction(1, 1, -1)};
}

Frame local_frame(const Vec3& axis, const Vec3& hint) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw InvalidParameter("zero axis");
  const Vec3 z = axis / n;
  Vec3 x = hint - hint.dot(z) * z;
  if (x.norm() < 1e-9 * std::max(1.0, hint.norm())) {
    // reference: the cartesian axis least aligned with z
    Eigen::Index i = 0;
    z.cwiseAbs().minCoeff(&i);
    const Vec3 ref = Vec3::Unit(i);
    x = ref - ref.dot(z) * z;
  }
  x.normalize();
  return {x, z.cross(x), z};
}

Vec3 tilted(const Vec3& axis, const Vec3& toward, double tilt, double b) {
  const Frame f = local_frame(axis, toward);
  return b * (std::cos(tilt) * f.z + std::sin(tilt) * f.x);
}

}  // namespace lattice
}  // namespace nvmpr
