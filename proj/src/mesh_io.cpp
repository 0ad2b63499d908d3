// Copyright 2026 The Meshfinish Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshfinish/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "meshfinish/error.hpp"

namespace meshfinish {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on blanks.
std::vector<std::string_view> tokens(std::string_view s) {
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

double parse_double(std::string_view s, std::size_t line) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

long parse_long(std::string_view s, std::size_t line) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad index '" + std::string(s) + "'");
  return v;
}

std::uint32_t resolve_index(long idx, std::size_t count, std::size_t line) {
  const long n = static_cast<long>(count);
  const long r = idx > 0 ? idx - 1 : n + idx;
  if (idx == 0 || r < 0 || r >= n)
    throw ParseError("line " + std::to_string(line) + ": index " + std::to_string(idx) +
                     " out of range");
  return static_cast<std::uint32_t>(r);
}

}  // namespace

IndexedMesh read_obj(std::istream& in) {
  IndexedMesh mesh;
  std::vector<Vec2> texcoords;
  std::vector<Vec3> normals;
  std::vector<Vec3> normal_sum;
  bool any_uv = false, all_uv = true, any_normal = false;
  std::vector<Vec2> corner_uvs;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tok = tokens(line);
    const std::string_view kind = tok[0];
    if (kind == "v") {
      if (tok.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": short vertex");
      mesh.positions.push_back({parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                                parse_double(tok[3], line_no)});
    } else if (kind == "vt") {
      if (tok.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": short texcoord");
      texcoords.push_back({parse_double(tok[1], line_no), parse_double(tok[2], line_no)});
    } else if (kind == "vn") {
      if (tok.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": short normal");
      normals.push_back({parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                         parse_double(tok[3], line_no)});
    } else if (kind == "f") {
      if (tok.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": face needs 3 corners");
      struct Corner {
        std::uint32_t v;
        std::optional<std::uint32_t> vt, vn;
      };
      std::vector<Corner> corners;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view c = tok[k];
        Corner corner{};
        const auto s1 = c.find('/');
        corner.v = resolve_index(parse_long(c.substr(0, s1), line_no), mesh.positions.size(), line_no);
        if (s1 != std::string_view::npos) {
          std::string_view rest = c.substr(s1 + 1);
          const auto s2 = rest.find('/');
          const std::string_view vt = rest.substr(0, s2);
          if (!vt.empty())
            corner.vt = resolve_index(parse_long(vt, line_no), texcoords.size(), line_no);
          if (s2 != std::string_view::npos && s2 + 1 < rest.size())
            corner.vn = resolve_index(parse_long(rest.substr(s2 + 1), line_no), normals.size(), line_no);
        }
        corners.push_back(corner);
      }
      for (std::size_t k = 1; k + 1 < corners.size(); ++k) {
        const Corner* tri[3] = {&corners[0], &corners[k], &corners[k + 1]};
        mesh.indices.push_back({tri[0]->v, tri[1]->v, tri[2]->v});
        for (const Corner* c : tri) {
          if (c->vt) {
            any_uv = true;
            corner_uvs.push_back(texcoords[*c->vt]);
          } else {
            all_uv = false;
            corner_uvs.push_back({});
          }
          if (c->vn) {
            any_normal = true;
            if (normal_sum.size() < mesh.positions.size()) normal_sum.resize(mesh.positions.size());
            normal_sum[c->v] += normals[*c->vn];
          }
        }
      }
    }
    // Other records (o, g, s, usemtl, mtllib, l) carry nothing we use.
  }
  if (any_uv && all_uv) mesh.corner_uvs = std::move(corner_uvs);
  if (any_normal) {
    normal_sum.resize(mesh.positions.size());
    bool complete = true;
    for (const Vec3& n : normal_sum) complete = complete && length(n) > 0;
    if (complete) {
      mesh.vertex_normals.resize(normal_sum.size());
      for (std::size_t v = 0; v < normal_sum.size(); ++v) mesh.vertex_normals[v] = normalize(normal_sum[v]);
    }
  }
  validate(mesh);
  return mesh;
}

IndexedMesh read_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_obj(in);
}

void write_obj(std::ostream& out, const IndexedMesh& mesh) {
  out << std::setprecision(17);
  for (const Vec3& p : mesh.positions) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for (const Vec3& n : mesh.vertex_normals) out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
  for (const Vec2& t : mesh.corner_uvs) out << "vt " << t.x << ' ' << t.y << '\n';
  const bool uv = mesh.has_uvs(), nrm = mesh.has_normals();
  for (std::size_t t = 0; t < mesh.indices.size(); ++t) {
    out << 'f';
    for (int c = 0; c < 3; ++c) {
      const auto v = mesh.indices[t][c] + 1;
      out << ' ' << v;
      if (uv || nrm) out << '/';
      if (uv) out << t * 3 + c + 1;
      if (nrm) out << '/' << v;
    }
    out << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const IndexedMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_obj(out, mesh);
}

namespace {

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType ply_type(std::string_view name) {
  static const std::map<std::string_view, PlyType> types = {
      {"char", PlyType::i8},    {"int8", PlyType::i8},     {"uchar", PlyType::u8},
      {"uint8", PlyType::u8},   {"short", PlyType::i16},   {"int16", PlyType::i16},
      {"ushort", PlyType::u16}, {"uint16", PlyType::u16},  {"int", PlyType::i32},
      {"int32", PlyType::i32},  {"uint", PlyType::u32},    {"uint32", PlyType::u32},
      {"float", PlyType::f32},  {"float32", PlyType::f32}, {"double", PlyType::f64},
      {"float64", PlyType::f64}};
  const auto it = types.find(name);
  if (it == types.end()) throw ParseError("ply: unknown property type '" + std::string(name) + "'");
  return it->second;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

class PlyValueReader {
 public:
  PlyValueReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double read(PlyType t) {
    if (!binary_) {
      std::string tok;
      if (!(in_ >> tok)) throw ParseError("ply: unexpected end of data");
      double v = 0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc()) throw ParseError("ply: bad value '" + tok + "'");
      return v;
    }
    char buf[8];
    const std::size_t n = ply_size(t);
    if (!in_.read(buf, static_cast<std::streamsize>(n))) throw ParseError("ply: truncated binary data");
    switch (t) {
      case PlyType::i8: return load_le<std::int8_t>(buf);
      case PlyType::u8: return load_le<std::uint8_t>(buf);
      case PlyType::i16: return load_le<std::int16_t>(buf);
      case PlyType::u16: return load_le<std::uint16_t>(buf);
      case PlyType::i32: return load_le<std::int32_t>(buf);
      case PlyType::u32: return load_le<std::uint32_t>(buf);
      case PlyType::f32: return load_le<float>(buf);
      case PlyType::f64: return load_le<double>(buf);
    }
    return 0;
  }

 private:
  std::istream& in_;
  bool binary_;
};

}  // namespace

IndexedMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ply") throw ParseError("ply: missing magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    const auto tok = tokens(trim(line));
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("ply: bad format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError("ply: unsupported format '" + std::string(tok[1]) + "'");
      }
    } else if (tok[0] == "element") {
      if (tok.size() < 3) throw ParseError("ply: bad element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(parse_long(tok[2], 0)), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("ply: property before element");
      if (tok.size() >= 5 && tok[1] == "list") {
        elements.back().properties.push_back({std::string(tok[4]), ply_type(tok[3]), true, ply_type(tok[2])});
      } else if (tok.size() >= 3) {
        elements.back().properties.push_back({std::string(tok[2]), ply_type(tok[1])});
      } else {
        throw ParseError("ply: bad property line");
      }
    } else if (tok[0] == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("ply: missing end_header");

  IndexedMesh mesh;
  std::vector<Vec3> normals;
  PlyValueReader reader(in, binary);
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    auto find = [&](std::string_view name) {
      for (std::size_t i = 0; i < el.properties.size(); ++i)
        if (el.properties[i].name == name) return static_cast<int>(i);
      return -1;
    };
    const int ix = find("x"), iy = find("y"), iz = find("z");
    const int inx = find("nx"), iny = find("ny"), inz = find("nz");
    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) throw ParseError("ply: vertex lacks x/y/z");
    std::vector<double> scalars(el.properties.size());
    for (std::size_t r = 0; r < el.count; ++r) {
      for (std::size_t p = 0; p < el.properties.size(); ++p) {
        const PlyProperty& prop = el.properties[p];
        if (!prop.is_list) {
          scalars[p] = reader.read(prop.type);
          continue;
        }
        const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
        std::vector<std::uint32_t> list(n);
        for (auto& v : list) v = static_cast<std::uint32_t>(reader.read(prop.type));
        if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
          if (n < 3) throw ParseError("ply: face with fewer than 3 vertices");
          for (std::size_t k = 1; k + 1 < n; ++k) mesh.indices.push_back({list[0], list[k], list[k + 1]});
        }
      }
      if (is_vertex) {
        mesh.positions.push_back({scalars[ix], scalars[iy], scalars[iz]});
        if (has_normals) normals.push_back(normalize(Vec3{scalars[inx], scalars[iny], scalars[inz]}));
      }
    }
  }
  if (!normals.empty()) mesh.vertex_normals = std::move(normals);
  validate(mesh);
  return mesh;
}

IndexedMesh read_ply(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ply(in);
}

IndexedMesh read_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_ply(path);
  throw ValidationError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

}  // namespace meshfinish
