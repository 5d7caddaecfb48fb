#pragma once

#include "tvmesh/energy.hpp"
#include "tvmesh/mesh.hpp"
#include "tvmesh/vertex_mask.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tvmesh {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IterationReport {
  int outerIndex = 0;
  double lagrangian = 0.0;
  double tv = 0.0;
  double maxResidual = 0.0;  // max_E |s_E - d_E|, the splitting constraint violation
  double minArea = 0.0;
};

/// Soft thresholding: max(|v| - threshold, 0) * sign(v).
double shrink(double v, double threshold);

/// d_E = shrink(s_E + b_E, beta / lambda) on every interior edge. This is the
/// exact minimizer of beta |d| |E| + lambda/2 (d - s_E - b_E)^2 |E|.
BregmanVariables d_step(const TriangleMesh& mesh, const BregmanVariables& vars,
                        const SolverParams& params);

/// b_E += s_E - d_E on every interior edge.
BregmanVariables b_step(const TriangleMesh& mesh, const BregmanVariables& vars);

/// `params.gradStepsPerOuter` explicit gradient steps on the augmented
/// Lagrangian, moving only free vertices.
///
/// A trial step is rejected, and the step length halved for that step, if
/// any triangle would drop to the area floor or flip its orientation, or an
/// interior edge would fold its two faces onto each other. After
/// 30 halvings a SolverError names the offending triangle.
TriangleMesh x_step(const TriangleMesh& mesh, DataView data, const BregmanVariables& vars,
                    const SolverParams& params, const VertexMask& mask);

struct SplitBregmanResult {
  TriangleMesh mesh;
  std::vector<IterationReport> reports;
  BregmanVariables vars;
};

using IterationCallback = std::function<void(const IterationReport&)>;

/// Alternates x_step, d_step and b_step from b = d = 0 for
/// `params.outerIters` iterations. With data the denoising Lagrangian is
/// used; without, the inpainting one (no fidelity term), in which case the
/// mask usually marks only the hole's interior as free.
SplitBregmanResult split_bregman(const TriangleMesh& mesh, DataView data,
                                 const SolverParams& params, const VertexMask& mask,
                                 const IterationCallback& onIteration = {});

/// Places every free vertex at the average of its neighbours (uniform graph
/// Laplacian, fixed vertices as boundary values). Uses only the fixed
/// positions and the connectivity, so it fills a hole whose interior
/// positions are unknown. Throws SolverError if a free region has no fixed
/// neighbour or the fill degenerates a triangle.
TriangleMesh harmonic_fill(const TriangleMesh& mesh, const VertexMask& mask);

/// Gradient descent on the total triangle area with respect to the free
/// vertices, moving each along its vertex normal, with the same step
/// safeguard as x_step. Produces the initial fill of an inpainting hole.
TriangleMesh minimal_surface_init(const TriangleMesh& mesh, const VertexMask& mask,
                                  double stepLength, int iters,
                                  double areaFloor = kDefaultAreaFloor);

/// CSV with header `outer,lagrangian,tv,max_residual,min_area`. Each
/// provenance pair is written before the header as a `# key = value` line.
void write_telemetry_csv(std::ostream& out, const std::vector<IterationReport>& reports,
                         const std::vector<std::pair<std::string, std::string>>& provenance = {});
void write_telemetry_csv(const std::filesystem::path& path,
                         const std::vector<IterationReport>& reports,
                         const std::vector<std::pair<std::string, std::string>>& provenance = {});

}  // namespace tvmesh
