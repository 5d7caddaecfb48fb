#pragma once

#include "tvmesh/mesh.hpp"
#include "tvmesh/vertex_mask.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tvmesh {

class EnergyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverParams {
  double beta = 0.01;        // weight of the TV term
  double lambda = 0.1;       // penalty weight of the splitting constraint
  double stepLength = 0.01;  // gradient step in the x-update
  int gradStepsPerOuter = 1;
  int outerIters = 200;
  double areaFloor = kDefaultAreaFloor;

  // Optional early exit once the splitting constraint and the vertex
  // positions have both settled.
  bool earlyStop = false;
  double residualTol = 1e-6;
  double changeTol = 1e-8;

  /// Throws EnergyError if a positivity constraint is violated.
  void validate() const;
};

/// Auxiliary variable d and scaled multiplier b, one entry per interior edge,
/// stored in the order of `edges` (the mesh's interior edge order).
struct BregmanVariables {
  std::vector<EdgeKey> edges;
  std::vector<double> d;
  std::vector<double> b;

  static BregmanVariables zeros(const TriangleMesh& mesh);
  /// Throws EnergyError unless keyed exactly by the mesh's interior edges.
  void check_keys(const TriangleMesh& mesh) const;
};

/// Data term positions; std::nullopt selects the inpainting functional.
using DataView = std::optional<std::span<const Vec3>>;

/// Signed dihedral angle of every frame.
std::vector<double> signed_distances(std::span<const EdgeFrame> frames);

/// Sum over interior edges of the angle between neighbouring face normals
/// times the edge length.
double tv_of_normal(const TriangleMesh& mesh);

/// 1/2 sum |x - data|^2 + beta * tv_of_normal.
double denoising_objective(const TriangleMesh& mesh, std::span<const Vec3> data,
                           const SolverParams& params);

/// 1/2 sum_V |x - data|^2 (denoising only)
///   + beta sum_E |d_E| |E|
///   + lambda/2 sum_E (d_E - s_E - b_E)^2 |E|
/// where s_E is the signed normal distance of edge E.
double augmented_lagrangian(const TriangleMesh& mesh, DataView data, const BregmanVariables& vars,
                            const SolverParams& params);

/// Exact gradient of augmented_lagrangian with respect to the vertex
/// positions. Fixed vertices get a zero gradient.
///
/// The signed distance depends on the geometry only through the two face
/// normals, with dS/dn+ = -mu+ and dS/dn- = -mu-. Those are pulled back
/// through n = N/|N|, N = (b - a) x (c - a). Edge lengths are
/// differentiated in both the |d| and the penalty term.
std::vector<Vec3> lagrangian_gradient(const TriangleMesh& mesh, DataView data,
                                      const BregmanVariables& vars, const SolverParams& params,
                                      const VertexMask& mask);

double total_area(const TriangleMesh& mesh);
std::vector<Vec3> area_gradient(const TriangleMesh& mesh, const VertexMask& mask);

}  // namespace tvmesh
