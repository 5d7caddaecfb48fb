#pragma once

#include "tvmesh/mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tvmesh {

/// The set of vertices an optimizer may move. Everything else is fixed.
class VertexMask {
 public:
  VertexMask() = default;

  static VertexMask all(std::size_t numVertices);
  static VertexMask none(std::size_t numVertices);
  /// Throws std::out_of_range for indices outside [0, numVertices).
  static VertexMask from_indices(std::size_t numVertices, std::span<const int> freeVertices);
  /// Vertices inside the closed axis-aligned box [lo, hi].
  static VertexMask from_box(const TriangleMesh& mesh, const Vec3& lo, const Vec3& hi);

  std::size_t size() const { return free_.size(); }
  bool is_free(std::size_t v) const { return free_[v] != 0; }
  std::size_t num_free() const;
  std::vector<int> free_indices() const;

 private:
  std::vector<char> free_;
};

}  // namespace tvmesh
