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

#include "meshfinish/uv_layout_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "meshfinish/error.hpp"

namespace meshfinish {

static_assert(std::endian::native == std::endian::little, "layout files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'F', 'U', 'V', 'L', 'A', 'Y', '1'};

void read_exact(std::istream& in, void* dst, std::size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw ParseError(std::string("uv layout: truncated ") + what);
}

}  // namespace

void write_layout(std::ostream& out, const UvLayout& layout) {
  const std::size_t n = layout.num_triangles();
  if (layout.corner_uvs.size() != 3 * n || layout.triangle_cube_face.size() != n)
    throw ValidationError("uv layout: inconsistent array sizes");
  const auto& d = layout.diagnostics;
  nlohmann::json header = {
      {"version", 1},
      {"triangles", n},
      {"alignment_rotation", layout.alignment_rotation.m},
      {"diagnostics",
       {{"isotropic_alignment", d.isotropic_alignment},
        {"visible", d.visible},
        {"first_occlusion", d.first_occlusion},
        {"remainder", d.remainder},
        {"islands", d.islands},
        {"demoted_slivers", d.demoted_slivers},
        {"demoted_overlaps", d.demoted_overlaps},
        {"visible_scale", d.visible_scale},
        {"first_occlusion_scale", d.first_occlusion_scale}}}};
  const std::string text = header.dump();
  const auto len = static_cast<std::uint32_t>(text.size());
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(layout.corner_uvs.data()),
            static_cast<std::streamsize>(n * 3 * sizeof(Vec2)));
  out.write(reinterpret_cast<const char*>(layout.triangle_layer.data()), static_cast<std::streamsize>(n));
  out.write(reinterpret_cast<const char*>(layout.triangle_cube_face.data()),
            static_cast<std::streamsize>(n));
  if (!out) throw IoError("uv layout: write failed");
}

UvLayout read_layout(std::istream& in) {
  char magic[8];
  read_exact(in, magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) throw ParseError("uv layout: bad magic");
  std::uint32_t len = 0;
  read_exact(in, &len, 4, "header length");
  if (len > (1u << 20)) throw ParseError("uv layout: header too large");
  std::string text(len, '\0');
  read_exact(in, text.data(), len, "header");
  UvLayout layout;
  std::size_t n = 0;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("version").get<int>() != 1) throw ParseError("uv layout: unsupported version");
    n = header.at("triangles").get<std::size_t>();
    const auto rot = header.at("alignment_rotation");
    for (int i = 0; i < 9; ++i) layout.alignment_rotation.m[i] = rot.at(i).get<double>();
    const auto& d = header.at("diagnostics");
    auto& o = layout.diagnostics;
    o.isotropic_alignment = d.at("isotropic_alignment").get<bool>();
    o.visible = d.at("visible").get<std::size_t>();
    o.first_occlusion = d.at("first_occlusion").get<std::size_t>();
    o.remainder = d.at("remainder").get<std::size_t>();
    o.islands = d.at("islands").get<std::size_t>();
    o.demoted_slivers = d.at("demoted_slivers").get<std::size_t>();
    o.demoted_overlaps = d.value("demoted_overlaps", std::size_t{0});
    o.visible_scale = d.at("visible_scale").get<double>();
    o.first_occlusion_scale = d.at("first_occlusion_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("uv layout header: ") + e.what());
  }
  if (n > (std::size_t{1} << 31)) throw ParseError("uv layout: triangle count out of range");
  layout.corner_uvs.resize(3 * n);
  layout.triangle_layer.resize(n);
  layout.triangle_cube_face.resize(n);
  read_exact(in, layout.corner_uvs.data(), n * 3 * sizeof(Vec2), "uvs");
  read_exact(in, layout.triangle_layer.data(), n, "layers");
  read_exact(in, layout.triangle_cube_face.data(), n, "cube faces");
  for (std::size_t t = 0; t < n; ++t) {
    if (static_cast<int>(layout.triangle_layer[t]) > 2) throw ParseError("uv layout: bad layer value");
    if (static_cast<int>(layout.triangle_cube_face[t]) > 5) throw ParseError("uv layout: bad cube face");
  }
  return layout;
}

void save_layout(const std::filesystem::path& path, const UvLayout& layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_layout(out, layout);
}

UvLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_layout(in);
}

}  // namespace meshfinish
