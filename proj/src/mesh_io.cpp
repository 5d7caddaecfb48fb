#include "tvmesh/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace tvmesh {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void parse_fail(std::string_view what, std::size_t line) {
  throw MeshError("parse error at line " + std::to_string(line) + ": " + std::string(what));
}

void fan_triangulate(const std::vector<int>& polygon, std::vector<Triangle>& out) {
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    out.push_back({polygon[0], polygon[i], polygon[i + 1]});
  }
}

void check_writable(const TriangleMesh& mesh) {
  for (const Vec3& v : mesh.vertices()) {
    if (!v.allFinite()) throw MeshError("refusing to write a mesh with non-finite vertices");
  }
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType ply_type(std::string_view name, std::size_t line) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  parse_fail("unknown PLY type '" + std::string(name) + "'", line);
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float64;
  bool isList = false;
  PlyType countType = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw MeshError("unexpected end of binary PLY data");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

double read_binary_value(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::Int8: return read_le<std::int8_t>(in);
    case PlyType::UInt8: return read_le<std::uint8_t>(in);
    case PlyType::Int16: return read_le<std::int16_t>(in);
    case PlyType::UInt16: return read_le<std::uint16_t>(in);
    case PlyType::Int32: return read_le<std::int32_t>(in);
    case PlyType::UInt32: return read_le<std::uint32_t>(in);
    case PlyType::Float32: return read_le<float>(in);
    case PlyType::Float64: return read_le<double>(in);
  }
  return 0.0;
}

// Reads PLY element data one value at a time, either from whitespace
// separated ASCII or from little-endian binary.
class PlyReader {
 public:
  PlyReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double next(PlyType t) {
    if (binary_) return read_binary_value(in_, t);
    std::string token;
    if (!(in_ >> token)) throw MeshError("unexpected end of ASCII PLY data");
    double value = 0.0;
    if (!parse_number(token, value)) throw MeshError("bad PLY value '" + token + "'");
    return value;
  }

 private:
  std::istream& in_;
  bool binary_;
};

int as_index(double value) {
  if (value < 0 || value != std::floor(value) || value > 2147483647.0) {
    throw MeshError("bad PLY vertex index");
  }
  return static_cast<int>(value);
}

}  // namespace

std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".ply") return MeshFormat::Ply;
  return std::nullopt;
}

TriangleMesh read_obj(std::istream& in, double areaFloor) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> polygon;
  std::string raw;
  std::size_t lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = split_ws(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_fail("vertex needs three coordinates", lineNo);
      Vec3 p;
      for (int i = 0; i < 3; ++i) {
        if (!parse_number(tokens[i + 1], p[i])) parse_fail("bad vertex coordinate", lineNo);
      }
      vertices.push_back(p);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) parse_fail("face needs at least three vertices", lineNo);
      polygon.clear();
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        // v, v/vt, v//vn and v/vt/vn all start with the position index.
        const std::string_view idxText = tokens[i].substr(0, tokens[i].find('/'));
        long idx = 0;
        if (!parse_number(idxText, idx) || idx == 0) parse_fail("bad face index", lineNo);
        const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertices.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long>(vertices.size())) {
          parse_fail("face index out of range", lineNo);
        }
        polygon.push_back(static_cast<int>(resolved));
      }
      fan_triangulate(polygon, triangles);
    }
    // Other records (vt, vn, o, g, s, usemtl, ...) carry nothing we keep.
  }
  if (in.bad()) throw MeshError("I/O error while reading OBJ");
  return TriangleMesh(std::move(vertices), std::move(triangles), areaFloor);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  check_writable(mesh);
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Triangle& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw MeshError("I/O error while writing OBJ");
}

TriangleMesh read_ply(std::istream& in, double areaFloor) {
  std::string raw;
  std::size_t lineNo = 0;
  auto next_line = [&]() -> std::string_view {
    if (!std::getline(in, raw)) throw MeshError("truncated PLY header");
    ++lineNo;
    return trim(raw);
  };
  if (next_line() != "ply") parse_fail("missing 'ply' magic", lineNo);

  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string_view line = next_line();
    if (line == "end_header") break;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2) parse_fail("bad format line", lineNo);
      if (tokens[1] == "ascii") {
        binary = false;
      } else if (tokens[1] == "binary_little_endian") {
        binary = true;
      } else {
        parse_fail("unsupported PLY format '" + std::string(tokens[1]) + "'", lineNo);
      }
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) parse_fail("bad element line", lineNo);
      PlyElement el;
      el.name = std::string(tokens[1]);
      if (!parse_number(tokens[2], el.count)) parse_fail("bad element count", lineNo);
      elements.push_back(std::move(el));
    } else if (tokens[0] == "property") {
      if (elements.empty()) parse_fail("property before element", lineNo);
      PlyProperty prop;
      if (tokens.size() == 5 && tokens[1] == "list") {
        prop.isList = true;
        prop.countType = ply_type(tokens[2], lineNo);
        prop.type = ply_type(tokens[3], lineNo);
        prop.name = std::string(tokens[4]);
      } else if (tokens.size() == 3) {
        prop.type = ply_type(tokens[1], lineNo);
        prop.name = std::string(tokens[2]);
      } else {
        parse_fail("bad property line", lineNo);
      }
      elements.back().properties.push_back(std::move(prop));
    } else {
      parse_fail("unknown header keyword '" + std::string(tokens[0]) + "'", lineNo);
    }
  }

  PlyReader reader(in, binary);
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> polygon;
  for (const PlyElement& el : elements) {
    const bool isVertex = el.name == "vertex";
    const bool isFace = el.name == "face";
    if (isVertex) vertices.reserve(el.count);
    for (std::size_t i = 0; i < el.count; ++i) {
      Vec3 p = Vec3::Zero();
      for (const PlyProperty& prop : el.properties) {
        if (prop.isList) {
          const double n = reader.next(prop.countType);
          if (n < 0 || n != std::floor(n)) throw MeshError("bad PLY list length");
          polygon.clear();
          for (int k = 0; k < static_cast<int>(n); ++k) polygon.push_back(as_index(reader.next(prop.type)));
          if (isFace && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            if (polygon.size() < 3) throw MeshError("PLY face with fewer than three vertices");
            fan_triangulate(polygon, triangles);
          }
        } else {
          const double value = reader.next(prop.type);
          if (isVertex) {
            if (prop.name == "x") p.x() = value;
            else if (prop.name == "y") p.y() = value;
            else if (prop.name == "z") p.z() = value;
          }
        }
      }
      if (isVertex) vertices.push_back(p);
    }
  }
  for (const Triangle& t : triangles) {
    for (int v : t) {
      if (v >= static_cast<int>(vertices.size())) throw MeshError("PLY face index out of range");
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles), areaFloor);
}

void write_ply(std::ostream& out, const TriangleMesh& mesh) {
  check_writable(mesh);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.num_vertices() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.num_triangles() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices()) {
    write_le<double>(out, v.x());
    write_le<double>(out, v.y());
    write_le<double>(out, v.z());
  }
  for (const Triangle& t : mesh.triangles()) {
    write_le<std::uint8_t>(out, 3);
    for (int idx : t) write_le<std::int32_t>(out, idx);
  }
  if (!out) throw MeshError("I/O error while writing PLY");
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format, double areaFloor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open '" + path.string() + "' for reading");
  return format == MeshFormat::Obj ? read_obj(in, areaFloor) : read_ply(in, areaFloor);
}

TriangleMesh load_mesh(const std::filesystem::path& path, double areaFloor) {
  const auto format = format_from_extension(path);
  if (!format) throw MeshError("cannot infer mesh format of '" + path.string() + "'");
  return load_mesh(path, *format, areaFloor);
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  check_writable(mesh);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MeshError("cannot open '" + path.string() + "' for writing");
  if (format == MeshFormat::Obj) {
    write_obj(out, mesh);
  } else {
    write_ply(out, mesh);
  }
  out.close();
  if (!out) throw MeshError("I/O error while writing '" + path.string() + "'");
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) throw MeshError("cannot infer mesh format of '" + path.string() + "'");
  save_mesh(mesh, path, *format);
}

std::vector<int> read_vertex_indices(std::istream& in) {
  std::vector<int> indices;
  std::string raw;
  std::size_t lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    int idx = -1;
    if (!parse_number(line, idx) || idx < 0) parse_fail("bad vertex index", lineNo);
    indices.push_back(idx);
  }
  return indices;
}

std::vector<int> read_vertex_indices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open '" + path.string() + "' for reading");
  return read_vertex_indices(in);
}

void write_vertex_indices(const std::filesystem::path& path, const std::vector<int>& indices) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw MeshError("cannot open '" + path.string() + "' for writing");
  for (int idx : indices) out << idx << '\n';
  if (!out) throw MeshError("I/O error while writing '" + path.string() + "'");
}

}  // namespace tvmesh
