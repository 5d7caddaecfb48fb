#include "tvmesh/mesh.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace tvmesh {
namespace {

struct DirectedUse {
  int face;
  int from;
  int to;
};

std::string edge_name(const EdgeKey& k) {
  std::ostringstream os;
  os << "(" << k.lo << ", " << k.hi << ")";
  return os.str();
}

std::shared_ptr<const MeshTopology> build_topology(std::size_t numVertices,
                                                   const std::vector<Triangle>& triangles) {
  std::map<EdgeKey, std::vector<DirectedUse>> uses;
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    const Triangle& t = triangles[f];
    for (int i = 0; i < 3; ++i) {
      if (t[i] < 0 || static_cast<std::size_t>(t[i]) >= numVertices) {
        throw MeshError("triangle " + std::to_string(f) + " references vertex " +
                        std::to_string(t[i]) + " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError("triangle " + std::to_string(f) + " repeats a vertex index");
    }
    for (int i = 0; i < 3; ++i) {
      const int a = t[i];
      const int b = t[(i + 1) % 3];
      uses[make_edge_key(a, b)].push_back({static_cast<int>(f), a, b});
    }
  }

  auto topo = std::make_shared<MeshTopology>();
  topo->edges.reserve(uses.size());
  for (const auto& [key, list] : uses) {
    topo->edges.push_back(key);
    if (list.size() == 1) {
      topo->boundary.push_back(key);
      continue;
    }
    if (list.size() > 2) {
      throw MeshError("non-manifold edge " + edge_name(key) + " shared by " +
                      std::to_string(list.size()) + " triangles");
    }
    const DirectedUse& first = list[0].face < list[1].face ? list[0] : list[1];
    const DirectedUse& second = list[0].face < list[1].face ? list[1] : list[0];
    if (first.from != second.to || first.to != second.from) {
      throw MeshError("inconsistent orientation across edge " + edge_name(key) +
                      " (triangles " + std::to_string(first.face) + " and " +
                      std::to_string(second.face) + ")");
    }
    topo->interior.push_back({key, first.from, first.to, first.face, second.face});
  }
  return topo;
}

void check_areas(const std::vector<Vec3>& vertices, const std::vector<Triangle>& triangles,
                 double areaFloor) {
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) throw MeshError("vertex coordinate is not finite");
  }
  const AreaExtremum smallest = min_triangle_area(vertices, triangles);
  if (smallest.face >= 0 && !(smallest.area > areaFloor)) {
    throw MeshError("degenerate triangle " + std::to_string(smallest.face) + " with area " +
                    std::to_string(smallest.area) + " at or below the area floor");
  }
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                           double areaFloor)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), areaFloor_(areaFloor) {
  if (!(areaFloor_ >= 0.0)) throw MeshError("area floor must be non-negative");
  topology_ = build_topology(vertices_.size(), triangles_);
  check_areas(vertices_, triangles_, areaFloor_);
}

TriangleMesh TriangleMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw MeshError("vertex count changed from " + std::to_string(vertices_.size()) + " to " +
                    std::to_string(vertices.size()));
  }
  check_areas(vertices, triangles_, areaFloor_);
  TriangleMesh out = *this;
  out.vertices_ = std::move(vertices);
  return out;
}

Vec3 face_normal_unnormalized(std::span<const Vec3> vertices, const Triangle& t) {
  const Vec3& a = vertices[t[0]];
  return (vertices[t[1]] - a).cross(vertices[t[2]] - a);
}

Vec3 face_normal(std::span<const Vec3> vertices, const Triangle& t) {
  return face_normal_unnormalized(vertices, t).normalized();
}

double triangle_area(std::span<const Vec3> vertices, const Triangle& t) {
  return 0.5 * face_normal_unnormalized(vertices, t).norm();
}

Vec3 face_normal(const TriangleMesh& mesh, int face) {
  return face_normal(mesh.vertices(), mesh.triangles()[face]);
}

double triangle_area(const TriangleMesh& mesh, int face) {
  return triangle_area(mesh.vertices(), mesh.triangles()[face]);
}

AreaExtremum min_triangle_area(std::span<const Vec3> vertices,
                               std::span<const Triangle> triangles) {
  AreaExtremum out;
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    const double a = triangle_area(vertices, triangles[f]);
    // NaN areas count as degenerate.
    if (out.face < 0 || !(a >= out.area)) {
      out.area = a;
      out.face = static_cast<int>(f);
    }
  }
  return out;
}

EdgeFrame make_edge_frame(std::span<const Vec3> vertices, std::span<const Triangle> triangles,
                          const InteriorEdge& edge) {
  EdgeFrame frame;
  frame.edge = edge;
  const Vec3 along = vertices[edge.to] - vertices[edge.from];
  frame.length = along.norm();
  const Vec3 nPlus = face_normal_unnormalized(vertices, triangles[edge.facePlus]);
  const Vec3 nMinus = face_normal_unnormalized(vertices, triangles[edge.faceMinus]);
  if (frame.length == 0.0 || nPlus.squaredNorm() == 0.0 || nMinus.squaredNorm() == 0.0) {
    throw MeshError("degenerate triangle at edge (" + std::to_string(edge.key.lo) + ", " +
                    std::to_string(edge.key.hi) + "): normal undefined");
  }
  const Vec3 dir = along / frame.length;
  frame.nPlus = nPlus.normalized();
  frame.nMinus = nMinus.normalized();
  // facePlus runs along +dir, faceMinus along -dir; edge x normal points
  // away from the opposite vertex in both cases.
  frame.muPlus = dir.cross(frame.nPlus);
  frame.muMinus = (-dir).cross(frame.nMinus);
  return frame;
}

std::vector<EdgeFrame> build_edge_frames(const TriangleMesh& mesh) {
  const auto& interior = mesh.topology().interior;
  std::vector<EdgeFrame> frames;
  frames.reserve(interior.size());
  for (const InteriorEdge& e : interior) {
    frames.push_back(make_edge_frame(mesh.vertices(), mesh.triangles(), e));
  }
  return frames;
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
  const auto& x = mesh.vertices();
  std::vector<Vec3> normals(x.size(), Vec3::Zero());
  std::vector<char> touched(x.size(), 0);
  for (const Triangle& t : mesh.triangles()) {
    // |N| = 2A, so summing unnormalized normals weights by area.
    const Vec3 n = face_normal_unnormalized(x, t);
    for (int v : t) {
      normals[v] += n;
      touched[v] = 1;
    }
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    const double len = normals[v].norm();
    if (!touched[v] || len == 0.0) {
      throw MeshError("vertex " + std::to_string(v) + " has no defined normal");
    }
    normals[v] /= len;
  }
  return normals;
}

double mean_edge_length(const TriangleMesh& mesh) {
  const auto& edges = mesh.topology().edges;
  if (edges.empty()) throw MeshError("mean edge length of a mesh without edges");
  double sum = 0.0;
  for (const EdgeKey& e : edges) sum += (mesh.vertices()[e.hi] - mesh.vertices()[e.lo]).norm();
  return sum / static_cast<double>(edges.size());
}

}  // namespace tvmesh
