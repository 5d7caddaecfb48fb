#include "tvmesh/solver.hpp"

#include "tvmesh/sphere.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace tvmesh {

// ------------------------------------------------------------ VertexMask

VertexMask VertexMask::all(std::size_t numVertices) {
  VertexMask m;
  m.free_.assign(numVertices, 1);
  return m;
}

VertexMask VertexMask::none(std::size_t numVertices) {
  VertexMask m;
  m.free_.assign(numVertices, 0);
  return m;
}

VertexMask VertexMask::from_indices(std::size_t numVertices, std::span<const int> freeVertices) {
  VertexMask m = none(numVertices);
  for (int v : freeVertices) {
    if (v < 0 || static_cast<std::size_t>(v) >= numVertices) {
      throw std::out_of_range("vertex index " + std::to_string(v) + " outside mesh with " +
                              std::to_string(numVertices) + " vertices");
    }
    m.free_[v] = 1;
  }
  return m;
}

VertexMask VertexMask::from_box(const TriangleMesh& mesh, const Vec3& lo, const Vec3& hi) {
  VertexMask m = none(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& p = mesh.vertices()[v];
    if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) m.free_[v] = 1;
  }
  return m;
}

std::size_t VertexMask::num_free() const {
  return static_cast<std::size_t>(std::count(free_.begin(), free_.end(), 1));
}

std::vector<int> VertexMask::free_indices() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < free_.size(); ++v) {
    if (free_[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

namespace {

constexpr int kMaxHalvings = 30;

void check_mask(const TriangleMesh& mesh, const VertexMask& mask) {
  if (mask.size() != mesh.num_vertices()) {
    throw SolverError("vertex mask size " + std::to_string(mask.size()) +
                      " does not match the mesh (" + std::to_string(mesh.num_vertices()) + ")");
  }
}

// Index of a triangle that the move from `before` to `after` makes invalid
// (area at or below the floor, or orientation reversed), or of a face folded
// back onto its neighbour; -1 if the move is acceptable.
int find_invalid_triangle(const TriangleMesh& mesh, std::span<const Vec3> after, double areaFloor) {
  const auto& tris = mesh.triangles();
  const auto& before = mesh.vertices();
  for (std::size_t f = 0; f < tris.size(); ++f) {
    const Vec3 nAfter = face_normal_unnormalized(after, tris[f]);
    const double area = 0.5 * nAfter.norm();
    if (!(area > areaFloor)) return static_cast<int>(f);
    if (!(nAfter.dot(face_normal_unnormalized(before, tris[f])) > 0.0)) return static_cast<int>(f);
  }
  for (const InteriorEdge& e : mesh.topology().interior) {
    const Vec3 nPlus = face_normal(after, tris[e.facePlus]);
    const Vec3 nMinus = face_normal(after, tris[e.faceMinus]);
    if (1.0 + nPlus.dot(nMinus) <= 1e-14) return e.facePlus;
  }
  return -1;
}

TriangleMesh safeguarded_step(const TriangleMesh& mesh, const std::vector<Vec3>& grad,
                              double stepLength, const VertexMask& mask, double areaFloor) {
  const bool stationary =
      std::all_of(grad.begin(), grad.end(), [](const Vec3& g) { return g.isZero(0.0); });
  if (stationary) return mesh;

  const double floor = std::max(areaFloor, mesh.area_floor());
  const auto& x = mesh.vertices();
  std::vector<Vec3> trial(x);
  double tau = stepLength;
  int offending = -1;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    for (std::size_t v = 0; v < x.size(); ++v) {
      if (mask.is_free(v)) trial[v] = x[v] - tau * grad[v];
    }
    offending = find_invalid_triangle(mesh, trial, floor);
    if (offending < 0) return mesh.with_vertices(std::move(trial));
    tau *= 0.5;
  }
  throw SolverError("no valid gradient step after " + std::to_string(kMaxHalvings) +
                    " halvings; triangle " + std::to_string(offending) +
                    " degenerates or flips");
}

double max_constraint_violation(std::span<const double> s, const BregmanVariables& vars) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] - vars.d[i]));
  return worst;
}

double relative_change(std::span<const Vec3> before, std::span<const Vec3> after) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t v = 0; v < before.size(); ++v) {
    diff += (after[v] - before[v]).squaredNorm();
    norm += before[v].squaredNorm();
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
}

}  // namespace

double shrink(double v, double threshold) {
  const double mag = std::max(std::abs(v) - threshold, 0.0);
  if (v > 0.0) return mag;
  if (v < 0.0) return -mag;
  return 0.0;
}

BregmanVariables d_step(const TriangleMesh& mesh, const BregmanVariables& vars,
                        const SolverParams& params) {
  vars.check_keys(mesh);
  const double threshold = params.beta / params.lambda;
  const auto s = signed_distances(build_edge_frames(mesh));
  BregmanVariables out = vars;
  for (std::size_t i = 0; i < s.size(); ++i) out.d[i] = shrink(s[i] + vars.b[i], threshold);
  return out;
}

BregmanVariables b_step(const TriangleMesh& mesh, const BregmanVariables& vars) {
  vars.check_keys(mesh);
  const auto s = signed_distances(build_edge_frames(mesh));
  BregmanVariables out = vars;
  for (std::size_t i = 0; i < s.size(); ++i) out.b[i] += s[i] - vars.d[i];
  return out;
}

TriangleMesh x_step(const TriangleMesh& mesh, DataView data, const BregmanVariables& vars,
                    const SolverParams& params, const VertexMask& mask) {
  check_mask(mesh, mask);
  TriangleMesh current = mesh;
  for (int step = 0; step < params.gradStepsPerOuter; ++step) {
    const auto grad = lagrangian_gradient(current, data, vars, params, mask);
    current = safeguarded_step(current, grad, params.stepLength, mask, params.areaFloor);
  }
  return current;
}

SplitBregmanResult split_bregman(const TriangleMesh& mesh, DataView data,
                                 const SolverParams& params, const VertexMask& mask,
                                 const IterationCallback& onIteration) {
  params.validate();
  check_mask(mesh, mask);
  if (data && data->size() != mesh.num_vertices()) {
    throw SolverError("data vertex count does not match the mesh");
  }

  SplitBregmanResult result{mesh, {}, BregmanVariables::zeros(mesh)};
  BregmanVariables& vars = result.vars;
  for (int k = 0; k < params.outerIters; ++k) {
    TriangleMesh next = x_step(result.mesh, data, vars, params, mask);
    const double change = relative_change(result.mesh.vertices(), next.vertices());
    result.mesh = std::move(next);

    vars = d_step(result.mesh, vars, params);
    vars = b_step(result.mesh, vars);
    const auto s = signed_distances(build_edge_frames(result.mesh));

    IterationReport report;
    report.outerIndex = k;
    report.lagrangian = augmented_lagrangian(result.mesh, data, vars, params);
    report.tv = tv_of_normal(result.mesh);
    report.maxResidual = max_constraint_violation(s, vars);
    report.minArea = min_triangle_area(result.mesh.vertices(), result.mesh.triangles()).area;
    result.reports.push_back(report);
    if (onIteration) onIteration(report);

    if (params.earlyStop && report.maxResidual < params.residualTol &&
        change < params.changeTol) {
      break;
    }
  }
  return result;
}

TriangleMesh harmonic_fill(const TriangleMesh& mesh, const VertexMask& mask) {
  check_mask(mesh, mask);
  const std::vector<int> freeIdx = mask.free_indices();
  if (freeIdx.empty()) return mesh;
  std::vector<int> slot(mesh.num_vertices(), -1);
  for (std::size_t i = 0; i < freeIdx.size(); ++i) slot[freeIdx[i]] = static_cast<int>(i);

  // Graph Laplacian rows of the free vertices; fixed neighbours go to the
  // right-hand side.
  const auto n = static_cast<Eigen::Index>(freeIdx.size());
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 3);
  const auto& x = mesh.vertices();
  for (const EdgeKey& e : mesh.topology().edges) {
    for (auto [a, b] : {std::pair{e.lo, e.hi}, std::pair{e.hi, e.lo}}) {
      if (slot[a] < 0) continue;
      entries.emplace_back(slot[a], slot[a], 1.0);
      if (slot[b] >= 0) {
        entries.emplace_back(slot[a], slot[b], -1.0);
      } else {
        rhs.row(slot[a]) += x[b].transpose();
      }
    }
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(entries.begin(), entries.end());
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
  if (solver.info() != Eigen::Success || (solver.vectorD().array() <= 1e-12).any()) {
    throw SolverError("harmonic fill needs every free region to touch a fixed vertex");
  }
  const Eigen::MatrixXd filled = solver.solve(rhs);
  std::vector<Vec3> out = x;
  for (std::size_t i = 0; i < freeIdx.size(); ++i) {
    out[freeIdx[i]] = filled.row(static_cast<Eigen::Index>(i)).transpose();
  }
  try {
    return mesh.with_vertices(std::move(out));
  } catch (const MeshError& e) {
    throw SolverError(std::string("harmonic fill produced an invalid mesh: ") + e.what());
  }
}

TriangleMesh minimal_surface_init(const TriangleMesh& mesh, const VertexMask& mask,
                                  double stepLength, int iters, double areaFloor) {
  check_mask(mesh, mask);
  if (!(stepLength > 0.0)) throw SolverError("step length must be positive");
  if (mask.num_free() == 0) return mesh;
  TriangleMesh current = mesh;
  for (int it = 0; it < iters; ++it) {
    // Only the normal component of the area gradient: the tangential part
    // slides vertices together and collapses triangles near corners.
    auto grad = area_gradient(current, mask);
    const auto normals = vertex_normals(current);
    for (std::size_t v = 0; v < grad.size(); ++v) grad[v] = grad[v].dot(normals[v]) * normals[v];
    current = safeguarded_step(current, grad, stepLength, mask, areaFloor);
  }
  return current;
}

void write_telemetry_csv(std::ostream& out, const std::vector<IterationReport>& reports,
                         const std::vector<std::pair<std::string, std::string>>& provenance) {
  for (const auto& [key, value] : provenance) out << "# " << key << " = " << value << '\n';
  out << "outer,lagrangian,tv,max_residual,min_area\n" << std::setprecision(17);
  for (const IterationReport& r : reports) {
    out << r.outerIndex << ',' << r.lagrangian << ',' << r.tv << ',' << r.maxResidual << ','
        << r.minArea << '\n';
  }
}

void write_telemetry_csv(const std::filesystem::path& path,
                         const std::vector<IterationReport>& reports,
                         const std::vector<std::pair<std::string, std::string>>& provenance) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SolverError("cannot open telemetry file '" + path.string() + "'");
  write_telemetry_csv(out, reports, provenance);
  if (!out) throw SolverError("I/O error while writing telemetry");
}

}  // namespace tvmesh
