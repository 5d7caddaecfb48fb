#pragma once

#include "tvmesh/mesh.hpp"

namespace tvmesh {

/// Surface of the cube [0, size]^3 with n x n x 2 triangles per side,
/// outward CCW orientation and shared vertices along the creases.
TriangleMesh make_cube(int n, double size = 1.0);

/// Flat square [0, size]^2 x {0} with n x n x 2 triangles, normal +z.
TriangleMesh make_grid(int n, double size = 1.0);

/// Unit cube [0, 1]^3 with the corner (1, 1, 1) cut off by the plane
/// through its three neighbouring cube vertices (x + y + z = 2).
TriangleMesh make_chopped_cube();

}  // namespace tvmesh
