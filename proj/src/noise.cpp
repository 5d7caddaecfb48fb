#include "tvmesh/noise.hpp"

#include "tvmesh/sphere.hpp"

#include <cmath>
#include <numbers>

namespace tvmesh {

double GaussianSampler::uniform_open0() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform_open0();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  hasSpare_ = true;
  return radius * std::cos(theta);
}

TriangleMesh add_normal_noise(const TriangleMesh& mesh, const NoiseSpec& spec) {
  if (!std::isfinite(spec.sigmaFactor) || spec.sigmaFactor < 0.0) {
    throw MeshError("noise sigma factor must be finite and non-negative");
  }
  const auto normals = vertex_normals(mesh);
  const double sigma = spec.sigmaFactor * mean_edge_length(mesh);
  GaussianSampler gauss(spec.seed);
  std::vector<Vec3> noisy = mesh.vertices();
  for (std::size_t v = 0; v < noisy.size(); ++v) noisy[v] += (sigma * gauss.next()) * normals[v];
  return mesh.with_vertices(std::move(noisy));
}

double mean_angular_error(const TriangleMesh& mesh, const TriangleMesh& reference) {
  if (mesh.triangles() != reference.triangles()) {
    throw MeshError("mean angular error needs identical connectivity");
  }
  if (mesh.empty()) throw MeshError("mean angular error of a mesh without triangles");
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const int face = static_cast<int>(f);
    sum += sphere::geodesic_distance(face_normal(mesh, face), face_normal(reference, face));
  }
  return sum / static_cast<double>(mesh.num_triangles());
}

double vertex_l2_error(const TriangleMesh& mesh, const TriangleMesh& reference) {
  if (mesh.num_vertices() != reference.num_vertices()) {
    throw MeshError("vertex L2 error needs equal vertex counts");
  }
  if (mesh.num_vertices() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    sum += (mesh.vertices()[v] - reference.vertices()[v]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(mesh.num_vertices()));
}

}  // namespace tvmesh
