#include "tvmesh/energy.hpp"

#include "tvmesh/sphere.hpp"

#include <cmath>
#include <string>

namespace tvmesh {
namespace {

void check_data(const TriangleMesh& mesh, std::span<const Vec3> data) {
  if (data.size() != mesh.num_vertices()) {
    throw EnergyError("data has " + std::to_string(data.size()) + " vertices, mesh has " +
                      std::to_string(mesh.num_vertices()));
  }
}

void check_mask(const TriangleMesh& mesh, const VertexMask& mask) {
  if (mask.size() != mesh.num_vertices()) {
    throw EnergyError("vertex mask size " + std::to_string(mask.size()) +
                      " does not match the mesh (" + std::to_string(mesh.num_vertices()) + ")");
  }
}

void check_area_floor(const TriangleMesh& mesh, double areaFloor) {
  const AreaExtremum smallest = min_triangle_area(mesh.vertices(), mesh.triangles());
  if (smallest.face >= 0 && !(smallest.area > areaFloor)) {
    throw MeshError("triangle " + std::to_string(smallest.face) +
                    " is at or below the area floor; its normal has no derivative");
  }
}

// Adds the gradient of g . ((b - a) x (c - a)) to the triangle's vertices.
void accumulate_cross_gradient(std::span<const Vec3> x, const Triangle& t, const Vec3& g,
                               std::vector<Vec3>& grad) {
  const Vec3& a = x[t[0]];
  const Vec3 ab = x[t[1]] - a;
  const Vec3 ac = x[t[2]] - a;
  const Vec3 gb = ac.cross(g);
  const Vec3 gc = g.cross(ab);
  grad[t[1]] += gb;
  grad[t[2]] += gc;
  grad[t[0]] -= gb + gc;
}

}  // namespace

void SolverParams::validate() const {
  if (!(beta > 0.0)) throw EnergyError("beta must be positive");
  if (!(lambda > 0.0)) throw EnergyError("lambda must be positive");
  if (!(stepLength > 0.0)) throw EnergyError("step length must be positive");
  if (gradStepsPerOuter < 1) throw EnergyError("gradient steps per outer iteration must be >= 1");
  if (outerIters < 0) throw EnergyError("outer iteration count must be non-negative");
  if (!(areaFloor >= 0.0)) throw EnergyError("area floor must be non-negative");
}

BregmanVariables BregmanVariables::zeros(const TriangleMesh& mesh) {
  BregmanVariables vars;
  const auto& interior = mesh.topology().interior;
  vars.edges.reserve(interior.size());
  for (const InteriorEdge& e : interior) vars.edges.push_back(e.key);
  vars.d.assign(interior.size(), 0.0);
  vars.b.assign(interior.size(), 0.0);
  return vars;
}

void BregmanVariables::check_keys(const TriangleMesh& mesh) const {
  const auto& interior = mesh.topology().interior;
  if (edges.size() != interior.size() || d.size() != interior.size() ||
      b.size() != interior.size()) {
    throw EnergyError("Bregman variables are not sized to the mesh's interior edges");
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (edges[i] != interior[i].key) {
      throw EnergyError("Bregman variable key mismatch at edge " + std::to_string(i));
    }
  }
}

std::vector<double> signed_distances(std::span<const EdgeFrame> frames) {
  std::vector<double> s;
  s.reserve(frames.size());
  for (const EdgeFrame& f : frames) s.push_back(sphere::signed_normal_distance(f));
  return s;
}

double tv_of_normal(const TriangleMesh& mesh) {
  double tv = 0.0;
  for (const EdgeFrame& f : build_edge_frames(mesh)) {
    tv += sphere::geodesic_distance(f.nPlus, f.nMinus) * f.length;
  }
  return tv;
}

double denoising_objective(const TriangleMesh& mesh, std::span<const Vec3> data,
                           const SolverParams& params) {
  check_data(mesh, data);
  double fidelity = 0.0;
  for (std::size_t v = 0; v < data.size(); ++v) {
    fidelity += (mesh.vertices()[v] - data[v]).squaredNorm();
  }
  return 0.5 * fidelity + params.beta * tv_of_normal(mesh);
}

double augmented_lagrangian(const TriangleMesh& mesh, DataView data, const BregmanVariables& vars,
                            const SolverParams& params) {
  vars.check_keys(mesh);
  double fidelity = 0.0;
  if (data) {
    check_data(mesh, *data);
    for (std::size_t v = 0; v < data->size(); ++v) {
      fidelity += (mesh.vertices()[v] - (*data)[v]).squaredNorm();
    }
  }
  double shrinkTerm = 0.0;
  double penalty = 0.0;
  const auto frames = build_edge_frames(mesh);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double s = sphere::signed_normal_distance(frames[i]);
    const double r = vars.d[i] - s - vars.b[i];
    shrinkTerm += std::abs(vars.d[i]) * frames[i].length;
    penalty += r * r * frames[i].length;
  }
  return 0.5 * fidelity + params.beta * shrinkTerm + 0.5 * params.lambda * penalty;
}

std::vector<Vec3> lagrangian_gradient(const TriangleMesh& mesh, DataView data,
                                      const BregmanVariables& vars, const SolverParams& params,
                                      const VertexMask& mask) {
  vars.check_keys(mesh);
  check_mask(mesh, mask);
  check_area_floor(mesh, params.areaFloor);
  const auto& x = mesh.vertices();
  std::vector<Vec3> grad(x.size(), Vec3::Zero());

  if (data) {
    check_data(mesh, *data);
    for (std::size_t v = 0; v < x.size(); ++v) grad[v] = x[v] - (*data)[v];
  }

  const auto& tris = mesh.triangles();
  const auto frames = build_edge_frames(mesh);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const EdgeFrame& f = frames[i];
    const double s = sphere::signed_normal_distance(f);
    const double r = vars.d[i] - s - vars.b[i];

    // Terms proportional to |E|.
    const double lengthCoef = params.beta * std::abs(vars.d[i]) + 0.5 * params.lambda * r * r;
    const Vec3 dir = (x[f.edge.to] - x[f.edge.from]) / f.length;
    grad[f.edge.to] += lengthCoef * dir;
    grad[f.edge.from] -= lengthCoef * dir;

    // d/ds of lambda/2 r^2 |E| is -lambda r |E|; dS/dN = -mu / |N|.
    const double sCoef = -params.lambda * r * f.length;
    const auto [gPlus, gMinus] = sphere::d_signed_distance(f);
    const Triangle& tPlus = tris[f.edge.facePlus];
    const Triangle& tMinus = tris[f.edge.faceMinus];
    const double areaPlus2 = face_normal_unnormalized(x, tPlus).norm();
    const double areaMinus2 = face_normal_unnormalized(x, tMinus).norm();
    accumulate_cross_gradient(x, tPlus, (sCoef / areaPlus2) * gPlus, grad);
    accumulate_cross_gradient(x, tMinus, (sCoef / areaMinus2) * gMinus, grad);
  }

  for (std::size_t v = 0; v < grad.size(); ++v) {
    if (!mask.is_free(v)) grad[v].setZero();
  }
  return grad;
}

double total_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) area += triangle_area(mesh, static_cast<int>(f));
  return area;
}

std::vector<Vec3> area_gradient(const TriangleMesh& mesh, const VertexMask& mask) {
  check_mask(mesh, mask);
  const auto& x = mesh.vertices();
  std::vector<Vec3> grad(x.size(), Vec3::Zero());
  for (const Triangle& t : mesh.triangles()) {
    // A = |N| / 2, so dA/dN = n / 2.
    const Vec3 n = face_normal_unnormalized(x, t);
    const double len = n.norm();
    if (len == 0.0) throw MeshError("degenerate triangle: area gradient undefined");
    accumulate_cross_gradient(x, t, (0.5 / len) * n, grad);
  }
  for (std::size_t v = 0; v < grad.size(); ++v) {
    if (!mask.is_free(v)) grad[v].setZero();
  }
  return grad;
}

}  // namespace tvmesh
