#pragma once

#include "tvmesh/mesh.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tvmesh {

struct NoiseSpec {
  double sigmaFactor = 0.3;  // standard deviation in units of the mean edge length
  std::uint64_t seed = 0;
};

/// Standard normal samples from std::mt19937_64 via the Box-Muller
/// transform. Both the engine and the transform are spelled out here (no
/// std::normal_distribution) so a seed gives the same stream on every
/// standard library.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform_open0();  // uniform on (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

/// Moves every vertex along its normal by g ~ N(0, (sigmaFactor * mean edge
/// length)^2), drawing one sample per vertex in index order.
TriangleMesh add_normal_noise(const TriangleMesh& mesh, const NoiseSpec& spec);

/// Mean over triangles of the angle between corresponding face normals.
/// Throws MeshError unless both meshes have identical triangles.
double mean_angular_error(const TriangleMesh& mesh, const TriangleMesh& reference);

/// sqrt(sum_V |x_V - x_V^ref|^2 / V).
double vertex_l2_error(const TriangleMesh& mesh, const TriangleMesh& reference);

}  // namespace tvmesh
