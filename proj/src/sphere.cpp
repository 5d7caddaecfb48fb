#include "tvmesh/sphere.hpp"

#include <cmath>

namespace tvmesh::sphere {
namespace {

// Angles within ~1.4e-7 of pi count as folded; the sign of the dihedral
// angle is not meaningful there.
constexpr double kFoldTolerance = 1e-14;

void check_not_folded(const EdgeFrame& frame) {
  if (1.0 + frame.nPlus.dot(frame.nMinus) <= kFoldTolerance) {
    throw SphereError("faces " + std::to_string(frame.edge.facePlus) + " and " +
                      std::to_string(frame.edge.faceMinus) +
                      " are folded onto each other (dihedral angle pi)");
  }
}

}  // namespace

TangentVector sphere_log(const Vec3& base, const Vec3& target) {
  TangentVector out{base, Vec3::Zero()};
  if (base == target) return out;
  const double c = clamp_unit(base.dot(target));
  const Vec3 tangential = target - c * base;
  const double len = tangential.norm();
  if (c < 0.0 && len < 1e-12) throw SphereError("sphere_log of antipodal points is undefined");
  const double angle = std::acos(c);
  if (angle == 0.0 || len == 0.0) return out;
  out.dir = (angle / len) * tangential;
  return out;
}

Vec3 sphere_exp(const TangentVector& v) {
  const double angle = v.dir.norm();
  if (angle == 0.0) return v.base;
  return std::cos(angle) * v.base + (std::sin(angle) / angle) * v.dir;
}

double geodesic_distance(const Vec3& a, const Vec3& b) { return std::acos(clamp_unit(a.dot(b))); }

double signed_normal_distance(const EdgeFrame& frame) {
  check_not_folded(frame);
  const double side = frame.muPlus.dot(frame.nMinus);
  if (side == 0.0) return 0.0;
  const double angle = geodesic_distance(frame.nPlus, frame.nMinus);
  return side > 0.0 ? angle : -angle;
}

Vec3 d_arccos_dn(const Vec3& base, const Vec3& other) {
  const double c = clamp_unit(base.dot(other));
  const double s = std::sqrt(1.0 - c * c);
  if (s <= 1e-12) throw SphereError("d_arccos_dn is singular for parallel vectors");
  return -(other - c * base) / s;
}

std::pair<Vec3, Vec3> d_signed_distance(const EdgeFrame& frame) {
  check_not_folded(frame);
  return {-frame.muPlus, -frame.muMinus};
}

}  // namespace tvmesh::sphere
