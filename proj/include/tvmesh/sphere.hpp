#pragma once

#include "tvmesh/mesh.hpp"

#include <stdexcept>
#include <utility>

/// Geometry of the unit sphere S^2, where the face normals live.
namespace tvmesh::sphere {

class SphereError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A vector in the tangent plane of S^2 at `base`.
struct TangentVector {
  Vec3 base = Vec3::UnitZ();
  Vec3 dir = Vec3::Zero();
};

/// Clamp to [-1, 1] so arccos never sees rounding drift past the domain.
inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

/// Logarithmic map: the tangent vector at `base` pointing to `target`, with
/// length equal to their geodesic distance. Throws SphereError for
/// antipodal inputs.
TangentVector sphere_log(const Vec3& base, const Vec3& target);

/// Exponential map, the inverse of sphere_log.
Vec3 sphere_exp(const TangentVector& v);

/// arccos of the clamped dot product, in [0, pi].
double geodesic_distance(const Vec3& a, const Vec3& b);

/// sign(muPlus . nMinus) * arccos(nPlus . nMinus): the signed dihedral angle
/// of the frame, positive at convex creases, negative at concave ones and
/// exactly 0 when the faces are coplanar. Throws SphereError when the two
/// faces are folded onto each other (nPlus = -nMinus).
double signed_normal_distance(const EdgeFrame& frame);

/// Tangential derivative of arccos(base . other) with respect to `base`:
/// -(other - (base . other) base) / sqrt(1 - (base . other)^2). A unit vector
/// tangent at `base`; singular (SphereError) when base = +-other.
Vec3 d_arccos_dn(const Vec3& base, const Vec3& other);

/// Derivatives of signed_normal_distance with respect to nPlus and nMinus,
/// which reduce to -muPlus and -muMinus. Continuous across coplanar faces.
std::pair<Vec3, Vec3> d_signed_distance(const EdgeFrame& frame);

}  // namespace tvmesh::sphere
