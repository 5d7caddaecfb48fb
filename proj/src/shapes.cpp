#include "tvmesh/shapes.hpp"

#include <array>
#include <map>

namespace tvmesh {

TriangleMesh make_cube(int n, double size) {
  if (n < 1) throw MeshError("cube resolution must be at least 1");
  using Lattice = std::array<int, 3>;
  std::map<Lattice, int> index;
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  auto vertex = [&](const Lattice& p) {
    auto [it, inserted] = index.try_emplace(p, static_cast<int>(vertices.size()));
    if (inserted) vertices.emplace_back(size * p[0] / n, size * p[1] / n, size * p[2] / n);
    return it->second;
  };

  // Per side: origin, then in-plane axes u, v with u x v the outward normal.
  struct Side {
    Lattice origin;
    Lattice u;
    Lattice v;
  };
  const std::array<Side, 6> sides{{
      {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},  // x = 0
      {{n, 0, 0}, {0, 1, 0}, {0, 0, 1}},  // x = 1
      {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}},  // y = 0
      {{0, n, 0}, {0, 0, 1}, {1, 0, 0}},  // y = 1
      {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},  // z = 0
      {{0, 0, n}, {1, 0, 0}, {0, 1, 0}},  // z = 1
  }};
  for (const Side& side : sides) {
    auto at = [&](int i, int j) {
      Lattice p;
      for (int k = 0; k < 3; ++k) p[k] = side.origin[k] + i * side.u[k] + j * side.v[k];
      return vertex(p);
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int p00 = at(i, j);
        const int p10 = at(i + 1, j);
        const int p11 = at(i + 1, j + 1);
        const int p01 = at(i, j + 1);
        triangles.push_back({p00, p10, p11});
        triangles.push_back({p00, p11, p01});
      }
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh make_grid(int n, double size) {
  if (n < 1) throw MeshError("grid resolution must be at least 1");
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices.emplace_back(size * i / n, size * j / n, 0.0);
  }
  auto at = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh make_chopped_cube() {
  // Corners 0..6 of the unit cube; (1, 1, 1) is removed.
  std::vector<Vec3> vertices{
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1},
  };
  std::vector<Triangle> triangles{
      {0, 2, 3}, {0, 3, 1},  // z = 0
      {0, 4, 6}, {0, 6, 2},  // x = 0
      {0, 1, 5}, {0, 5, 4},  // y = 0
      {4, 5, 6},             // z = 1, remaining half
      {1, 3, 5},             // x = 1, remaining half
      {2, 6, 3},             // y = 1, remaining half
      {3, 6, 5},             // cut plane x + y + z = 2
  };
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

}  // namespace tvmesh
