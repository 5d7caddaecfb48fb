#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvmesh {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Triangles with area at or below this value (squared model units) are
/// considered degenerate: their normal is undefined.
inline constexpr double kDefaultAreaFloor = 1e-12;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge identified by its sorted vertex pair.
struct EdgeKey {
  int lo = 0;
  int hi = 0;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

inline EdgeKey make_edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

/// An edge shared by exactly two triangles. `from -> to` is the direction in
/// which `facePlus` traverses the edge; `faceMinus` traverses it `to -> from`.
/// The '+' side is always the incident triangle with the smaller index.
struct InteriorEdge {
  EdgeKey key;
  int from = 0;
  int to = 0;
  int facePlus = 0;
  int faceMinus = 0;
};

/// Connectivity derived once from the triangle list. Interior and boundary
/// edges are sorted by key.
struct MeshTopology {
  std::vector<EdgeKey> edges;
  std::vector<InteriorEdge> interior;
  std::vector<EdgeKey> boundary;
};

/// Oriented 2-manifold triangle mesh (with boundary).
///
/// Construction validates the invariants: in-range and distinct indices,
/// every triangle above the area floor, each edge bordered by one or two
/// triangles, and opposite traversal of every interior edge. Connectivity is
/// immutable and shared between copies that only differ in vertex positions.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
               double areaFloor = kDefaultAreaFloor);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const MeshTopology& topology() const { return *topology_; }
  double area_floor() const { return areaFloor_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  /// Same connectivity with new positions; re-checks the area floor.
  TriangleMesh with_vertices(std::vector<Vec3> vertices) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::shared_ptr<const MeshTopology> topology_ = std::make_shared<MeshTopology>();
  double areaFloor_ = kDefaultAreaFloor;
};

/// Cross product of the CCW edge vectors, (b - a) x (c - a). Its length is
/// twice the triangle area.
Vec3 face_normal_unnormalized(std::span<const Vec3> vertices, const Triangle& t);
Vec3 face_normal(std::span<const Vec3> vertices, const Triangle& t);
double triangle_area(std::span<const Vec3> vertices, const Triangle& t);

Vec3 face_normal(const TriangleMesh& mesh, int face);
double triangle_area(const TriangleMesh& mesh, int face);

struct AreaExtremum {
  double area = 0.0;
  int face = -1;
};
/// Smallest triangle area; `face` is -1 for a mesh without triangles.
AreaExtremum min_triangle_area(std::span<const Vec3> vertices,
                               std::span<const Triangle> triangles);

/// Per-interior-edge geometry: length, the two unit face normals and the two
/// unit co-normals. A co-normal lies in the plane of its triangle,
/// perpendicular to the edge, and points away from the triangle interior.
struct EdgeFrame {
  InteriorEdge edge;
  double length = 0.0;
  Vec3 nPlus = Vec3::Zero();
  Vec3 nMinus = Vec3::Zero();
  Vec3 muPlus = Vec3::Zero();
  Vec3 muMinus = Vec3::Zero();
};

EdgeFrame make_edge_frame(std::span<const Vec3> vertices, std::span<const Triangle> triangles,
                          const InteriorEdge& edge);

/// One frame per interior edge, in topology order. Boundary edges are excluded.
std::vector<EdgeFrame> build_edge_frames(const TriangleMesh& mesh);

/// Area-weighted average of incident face normals, renormalized. Throws
/// MeshError for a vertex without incident triangles.
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

/// Arithmetic mean length over all edges, boundary and interior.
double mean_edge_length(const TriangleMesh& mesh);

}  // namespace tvmesh
