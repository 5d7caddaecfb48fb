#pragma once

#include "tvmesh/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace tvmesh {

enum class MeshFormat { Obj, Ply };

/// Format from the file extension (.obj / .ply, case-insensitive).
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);

/// Polygonal faces are fan-triangulated from their first vertex. Throws
/// MeshError on parse failures and on any TriangleMesh invariant violation.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                       double areaFloor = kDefaultAreaFloor);
TriangleMesh load_mesh(const std::filesystem::path& path, double areaFloor = kDefaultAreaFloor);

/// Vertices are written with 17 significant digits (OBJ) or as float64
/// (binary little-endian PLY), so a reload reproduces them bit for bit.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

TriangleMesh read_obj(std::istream& in, double areaFloor = kDefaultAreaFloor);
void write_obj(std::ostream& out, const TriangleMesh& mesh);

TriangleMesh read_ply(std::istream& in, double areaFloor = kDefaultAreaFloor);
void write_ply(std::ostream& out, const TriangleMesh& mesh);

/// Plain text, one 0-based vertex index per line; blank lines and lines
/// starting with '#' are ignored.
std::vector<int> read_vertex_indices(const std::filesystem::path& path);
std::vector<int> read_vertex_indices(std::istream& in);
void write_vertex_indices(const std::filesystem::path& path, const std::vector<int>& indices);

}  // namespace tvmesh
