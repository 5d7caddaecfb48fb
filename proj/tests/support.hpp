#pragma once

// Seeded generators and independent oracles shared by the unit tests and the
// acceptance binary. The oracles deliberately avoid the library's edge
// frames and topology so they can catch convention errors there.

#include "tvmesh/energy.hpp"
#include "tvmesh/mesh.hpp"
#include "tvmesh/shapes.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace testsupport {

using tvmesh::Triangle;
using tvmesh::TriangleMesh;
using tvmesh::Vec3;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Vec3 unit_vector() {
    for (;;) {
      const Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      const double n = v.norm();
      if (n > 0.1 && n <= 1.0) return v / n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Brute-force exterior dihedral angles: every pair of triangles sharing an
/// edge, found by scanning all triangle pairs. Positive when convex.
struct OracleEdge {
  int lo;
  int hi;
  double length;
  double signedAngle;
};

inline Vec3 oracle_normal(const std::vector<Vec3>& x, const Triangle& t) {
  return (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]).normalized();
}

inline std::vector<OracleEdge> oracle_edges(const std::vector<Vec3>& x,
                                            const std::vector<Triangle>& tris) {
  std::vector<OracleEdge> out;
  for (std::size_t f = 0; f < tris.size(); ++f) {
    for (std::size_t g = f + 1; g < tris.size(); ++g) {
      for (int i = 0; i < 3; ++i) {
        const int a = tris[f][i];
        const int b = tris[f][(i + 1) % 3];
        bool shared = false;
        for (int j = 0; j < 3; ++j) {
          if (tris[g][j] == b && tris[g][(j + 1) % 3] == a) shared = true;
        }
        if (!shared) continue;
        const Vec3 n1 = oracle_normal(x, tris[f]);
        const Vec3 n2 = oracle_normal(x, tris[g]);
        const Vec3 dir = (x[b] - x[a]).normalized();
        // n1 x n2 is parallel to the edge; along a -> b (as f walks it) the
        // crease is convex.
        const double angle = std::atan2(dir.dot(n1.cross(n2)), n1.dot(n2));
        out.push_back({std::min(a, b), std::max(a, b), (x[b] - x[a]).norm(), angle});
      }
    }
  }
  return out;
}

inline double oracle_tv(const std::vector<Vec3>& x, const std::vector<Triangle>& tris) {
  double tv = 0.0;
  for (const OracleEdge& e : oracle_edges(x, tris)) tv += std::abs(e.signedAngle) * e.length;
  return tv;
}

inline double oracle_tv(const TriangleMesh& mesh) {
  return oracle_tv(mesh.vertices(), mesh.triangles());
}

/// Augmented Lagrangian from the oracle edges, with d and b looked up by key.
inline double oracle_lagrangian(const std::vector<Vec3>& x, const std::vector<Triangle>& tris,
                                const std::vector<Vec3>* data,
                                const tvmesh::BregmanVariables& vars,
                                const tvmesh::SolverParams& p) {
  std::map<std::pair<int, int>, std::pair<double, double>> db;
  for (std::size_t i = 0; i < vars.edges.size(); ++i) {
    db[{vars.edges[i].lo, vars.edges[i].hi}] = {vars.d[i], vars.b[i]};
  }
  double sum = 0.0;
  if (data) {
    for (std::size_t v = 0; v < x.size(); ++v) sum += 0.5 * (x[v] - (*data)[v]).squaredNorm();
  }
  for (const OracleEdge& e : oracle_edges(x, tris)) {
    const auto [d, b] = db.at({e.lo, e.hi});
    const double r = d - e.signedAngle - b;
    sum += p.beta * std::abs(d) * e.length + 0.5 * p.lambda * r * r * e.length;
  }
  return sum;
}

inline double min_abs_angle(const TriangleMesh& mesh, double* maxAbs = nullptr) {
  double lo = M_PI;
  double hi = 0.0;
  for (const OracleEdge& e : oracle_edges(mesh.vertices(), mesh.triangles())) {
    lo = std::min(lo, std::abs(e.signedAngle));
    hi = std::max(hi, std::abs(e.signedAngle));
  }
  if (maxAbs) *maxAbs = hi;
  return lo;
}

/// Open height field over an m x m lattice with randomly chosen diagonals.
inline TriangleMesh random_height_field(Rng& rng, int m) {
  std::vector<Vec3> x;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double h = 1.0 / (m - 1);
      x.emplace_back(i * h + rng.uniform(-0.15, 0.15) * h, j * h + rng.uniform(-0.15, 0.15) * h,
                     rng.uniform(-0.25, 0.25) * h);
    }
  }
  std::vector<Triangle> tris;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j + 1 < m; ++j) {
    for (int i = 0; i + 1 < m; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
      if (rng.integer(0, 1)) {
        tris.push_back({p00, p10, p11});
        tris.push_back({p00, p11, p01});
      } else {
        tris.push_back({p00, p10, p01});
        tris.push_back({p10, p11, p01});
      }
    }
  }
  return TriangleMesh(std::move(x), std::move(tris));
}

/// Closed cube surface (n = 1 or 2) with every vertex jittered.
inline TriangleMesh random_closed_mesh(Rng& rng, int n) {
  const TriangleMesh cube = tvmesh::make_cube(n);
  std::vector<Vec3> x = cube.vertices();
  const double h = 1.0 / n;
  for (Vec3& v : x) v += Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * 0.12 * h;
  return cube.with_vertices(std::move(x));
}

/// A valid mesh with 8..50 vertices whose exterior dihedral angles all lie
/// in (1e-3, pi - 1e-3).
inline TriangleMesh random_valid_mesh(Rng& rng) {
  for (;;) {
    const int kind = rng.integer(0, 2);
    TriangleMesh mesh = kind == 0   ? random_closed_mesh(rng, 1)
                        : kind == 1 ? random_closed_mesh(rng, 2)
                                    : random_height_field(rng, rng.integer(3, 7));
    double hi = 0.0;
    const double lo = min_abs_angle(mesh, &hi);
    if (lo > 1e-3 && hi < M_PI - 1e-3 && mesh.num_vertices() >= 8 && mesh.num_vertices() <= 50) {
      return mesh;
    }
  }
}

inline tvmesh::BregmanVariables random_vars(Rng& rng, const TriangleMesh& mesh, double scale) {
  auto vars = tvmesh::BregmanVariables::zeros(mesh);
  for (double& d : vars.d) d = rng.uniform(-scale, scale);
  for (double& b : vars.b) b = rng.uniform(-scale, scale);
  return vars;
}

/// Central differences of f over every vertex coordinate.
inline std::vector<Vec3> central_difference(
    const std::vector<Vec3>& x, double h,
    const std::function<double(const std::vector<Vec3>&)>& f) {
  std::vector<Vec3> grad(x.size(), Vec3::Zero());
  std::vector<Vec3> probe = x;
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (int k = 0; k < 3; ++k) {
      probe[v][k] = x[v][k] + h;
      const double up = f(probe);
      probe[v][k] = x[v][k] - h;
      const double down = f(probe);
      probe[v][k] = x[v][k];
      grad[v][k] = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

inline double relative_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]).squaredNorm();
    norm += b[i].squaredNorm();
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

/// Distance from p to the surface of the unit cube [0, 1]^3.
inline double distance_to_unit_cube_surface(const Vec3& p) {
  Vec3 outside = Vec3::Zero();
  bool inside = true;
  for (int k = 0; k < 3; ++k) {
    if (p[k] < 0.0) outside[k] = -p[k], inside = false;
    if (p[k] > 1.0) outside[k] = p[k] - 1.0, inside = false;
  }
  if (!inside) return outside.norm();
  double best = 1.0;
  for (int k = 0; k < 3; ++k) best = std::min({best, p[k], 1.0 - p[k]});
  return best;
}

}  // namespace testsupport
