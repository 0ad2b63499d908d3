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

#include "meshfinish/glb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "json.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/png_io.hpp"

namespace meshfinish {

static_assert(std::endian::native == std::endian::little, "GLB writer assumes a little-endian host");

namespace {

constexpr std::uint32_t kMagic = 0x46546C67;      // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;  // "JSON"
constexpr std::uint32_t kChunkBin = 0x004E4942;   // "BIN\0"

constexpr int kFloat = 5126;
constexpr int kUnsignedByte = 5121;
constexpr int kUnsignedShort = 5123;
constexpr int kUnsignedInt = 5125;
constexpr int kArrayBuffer = 34962;
constexpr int kElementArrayBuffer = 34963;

using Json = nlohmann::ordered_json;

std::size_t pad4(std::size_t n) { return (n + 3) & ~std::size_t{3}; }

struct BinWriter {
  std::vector<std::uint8_t> bytes;
  Json views = Json::array();

  int add(const void* data, std::size_t size, std::optional<int> target) {
    bytes.resize(pad4(bytes.size()), 0);
    const std::size_t offset = bytes.size();
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + size);
    Json view = {{"buffer", 0}, {"byteOffset", offset}, {"byteLength", size}};
    if (target) view["target"] = *target;
    views.push_back(view);
    return static_cast<int>(views.size()) - 1;
  }
};

struct UvKey {
  std::uint32_t vertex;
  std::uint64_t u, v;
  bool operator==(const UvKey&) const = default;
};

struct UvKeyHash {
  std::size_t operator()(const UvKey& k) const {
    std::uint64_t h = k.vertex * 0x9E3779B97F4A7C15ull;
    h ^= k.u + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= k.v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

WeldedMesh weld_by_uv(const IndexedMesh& mesh) {
  if (!mesh.has_uvs() || mesh.corner_uvs.size() != mesh.indices.size() * 3)
    throw ValidationError("export: mesh has no per-corner UVs");
  const IndexedMesh normals = mesh.has_normals() ? IndexedMesh{} : compute_geometry_normals(mesh);
  const auto& vn = mesh.has_normals() ? mesh.vertex_normals : normals.vertex_normals;
  WeldedMesh out;
  out.indices.resize(mesh.indices.size());
  std::unordered_map<UvKey, std::uint32_t, UvKeyHash> ids;
  ids.reserve(mesh.indices.size() * 2);
  for (std::size_t t = 0; t < mesh.indices.size(); ++t)
    for (int c = 0; c < 3; ++c) {
      const std::uint32_t v = mesh.indices[t][c];
      // +0.0 so -0 and 0 weld together.
      const Vec2 uv = mesh.corner_uvs[t * 3 + c] + Vec2{0.0, 0.0};
      const UvKey key{v, std::bit_cast<std::uint64_t>(uv.x), std::bit_cast<std::uint64_t>(uv.y)};
      auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(out.positions.size()));
      if (inserted) {
        out.positions.push_back(mesh.positions[v]);
        out.normals.push_back(vn[v]);
        out.uvs.push_back(uv);
      }
      out.indices[t][c] = it->second;
    }
  return out;
}

std::vector<std::uint8_t> build_glb(const IndexedMesh& mesh, const GlbTextures& tex, const PbrMaterial& material,
                                    const GlbExportOptions& options) {
  validate(mesh);
  if (mesh.indices.empty()) throw ValidationError("export: mesh has no triangles");
  if (!tex.albedo || !tex.normal) throw ValidationError("export: albedo and normal textures are required");
  for (const TextureImage* t : {tex.albedo, tex.normal, tex.metallic_roughness}) {
    if (!t) continue;
    if (t->width != tex.albedo->width || t->height != tex.albedo->height)
      throw ValidationError("export: texture dimensions differ");
    if (t->channels < 3) throw ValidationError("export: textures must be RGB");
  }
  const WeldedMesh w = weld_by_uv(mesh);
  const std::size_t nv = w.positions.size();

  BinWriter bin;
  Json accessors = Json::array();

  // Indices.
  const bool small = nv < 65536;
  if (small) {
    std::vector<std::uint16_t> idx;
    idx.reserve(w.indices.size() * 3);
    for (const Tri& t : w.indices)
      for (auto i : t) idx.push_back(static_cast<std::uint16_t>(i));
    bin.add(idx.data(), idx.size() * 2, kElementArrayBuffer);
  } else {
    bin.add(w.indices.data(), w.indices.size() * 12, kElementArrayBuffer);
  }
  accessors.push_back({{"bufferView", 0},
                       {"componentType", small ? kUnsignedShort : kUnsignedInt},
                       {"count", w.indices.size() * 3},
                       {"type", "SCALAR"}});

  std::vector<float> pos(nv * 3), nrm(nv * 3), uv(nv * 2);
  float lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
  for (std::size_t i = 0; i < nv; ++i) {
    // Normals that are unit to float precision are stored as given, so an
    // imported asset exports to the same bytes.
    const Vec3 n = std::fabs(length_squared(w.normals[i]) - 1.0) > 1e-6 ? normalize(w.normals[i]) : w.normals[i];
    for (int a = 0; a < 3; ++a) {
      const float p = static_cast<float>(w.positions[i][a]);
      pos[i * 3 + a] = p;
      lo[a] = std::min(lo[a], p);
      hi[a] = std::max(hi[a], p);
      nrm[i * 3 + a] = static_cast<float>(n[a]);
    }
    uv[i * 2] = static_cast<float>(w.uvs[i].x);
    uv[i * 2 + 1] = static_cast<float>(1.0 - w.uvs[i].y);  // glTF images start at the top row
  }
  const int pos_view = bin.add(pos.data(), pos.size() * 4, kArrayBuffer);
  accessors.push_back({{"bufferView", pos_view},
                       {"componentType", kFloat},
                       {"count", nv},
                       {"type", "VEC3"},
                       {"min", {lo[0], lo[1], lo[2]}},
                       {"max", {hi[0], hi[1], hi[2]}}});
  const int nrm_view = bin.add(nrm.data(), nrm.size() * 4, kArrayBuffer);
  accessors.push_back({{"bufferView", nrm_view}, {"componentType", kFloat}, {"count", nv}, {"type", "VEC3"}});
  const int uv_view = bin.add(uv.data(), uv.size() * 4, kArrayBuffer);
  accessors.push_back({{"bufferView", uv_view}, {"componentType", kFloat}, {"count", nv}, {"type", "VEC2"}});

  // Images: albedo (sRGB), normal, optional metallic-roughness.
  std::vector<const TextureImage*> images = {tex.albedo, tex.normal};
  if (tex.metallic_roughness) images.push_back(tex.metallic_roughness);
  std::vector<std::vector<std::uint8_t>> pngs(images.size());
  parallel_for_each(0, images.size(), 1, [&](std::size_t i) {
    TextureImage rgb = *images[i];
    if (rgb.channels == 4) {  // drop alpha; glTF base colour alpha would mean opacity
      TextureImage tmp(rgb.width, rgb.height, 3);
      for (std::size_t k = 0; k < rgb.num_texels(); ++k)
        for (int c = 0; c < 3; ++c) tmp.data[k * 3 + c] = rgb.data[k * 4 + c];
      rgb = std::move(tmp);
    }
    pngs[i] = encode_png(rgb, PngOptions{i == 0, options.png_compression});
  });
  Json json_images = Json::array(), json_textures = Json::array();
  for (std::size_t i = 0; i < pngs.size(); ++i) {
    const int view = bin.add(pngs[i].data(), pngs[i].size(), std::nullopt);
    json_images.push_back({{"bufferView", view}, {"mimeType", "image/png"}});
    json_textures.push_back({{"sampler", 0}, {"source", i}});
  }

  const PbrMaterial m = make_material(material.metallic, material.roughness);
  Json pbr = {{"baseColorTexture", {{"index", 0}}}};
  Json mat = {{"name", "material"}};
  if (tex.metallic_roughness) {
    // The texture carries the values; unit factors keep factor * texel equal
    // to the scalar. The exact scalars ride along in extras.
    pbr["metallicFactor"] = 1.0;
    pbr["roughnessFactor"] = 1.0;
    pbr["metallicRoughnessTexture"] = {{"index", 2}};
  } else {
    pbr["metallicFactor"] = m.metallic;
    pbr["roughnessFactor"] = m.roughness;
  }
  mat["pbrMetallicRoughness"] = pbr;
  mat["normalTexture"] = {{"index", 1}};
  if (tex.metallic_roughness) mat["extras"] = {{"metallic", m.metallic}, {"roughness", m.roughness}};

  bin.bytes.resize(pad4(bin.bytes.size()), 0);
  Json primitive = {{"attributes", {{"POSITION", 1}, {"NORMAL", 2}, {"TEXCOORD_0", 3}}},
                    {"indices", 0},
                    {"material", 0},
                    {"mode", 4}};
  Json doc = Json::object();
  doc["asset"] = {{"version", "2.0"}, {"generator", options.generator}};
  doc["scene"] = 0;
  doc["scenes"] = Json::array({Json{{"nodes", Json::array({0})}}});
  doc["nodes"] = Json::array({Json{{"mesh", 0}}});
  doc["meshes"] = Json::array({Json{{"primitives", Json::array({primitive})}}});
  doc["materials"] = Json::array({mat});
  doc["textures"] = json_textures;
  doc["images"] = json_images;
  doc["samplers"] =
      Json::array({Json{{"magFilter", 9729}, {"minFilter", 9729}, {"wrapS", 33071}, {"wrapT", 33071}}});
  doc["accessors"] = accessors;
  doc["bufferViews"] = bin.views;
  doc["buffers"] = Json::array({Json{{"byteLength", bin.bytes.size()}}});
  std::string text = doc.dump();
  text.resize(pad4(text.size()), ' ');

  const std::size_t total = 12 + 8 + text.size() + 8 + bin.bytes.size();
  if (total > 0xFFFFFFFFu) throw ValidationError("export: asset exceeds the 4 GiB GLB limit");
  std::vector<std::uint8_t> out;
  out.reserve(total);
  auto put32 = [&](std::uint32_t v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + 4);
  };
  put32(kMagic);
  put32(2);
  put32(static_cast<std::uint32_t>(total));
  put32(static_cast<std::uint32_t>(text.size()));
  put32(kChunkJson);
  out.insert(out.end(), text.begin(), text.end());
  put32(static_cast<std::uint32_t>(bin.bytes.size()));
  put32(kChunkBin);
  out.insert(out.end(), bin.bytes.begin(), bin.bytes.end());
  return out;
}

std::size_t export_glb(const IndexedMesh& mesh, const GlbTextures& textures, const PbrMaterial& material,
                       const std::filesystem::path& path, const GlbExportOptions& options) {
  const auto bytes = build_glb(mesh, textures, material, options);
  write_file_bytes(path, bytes);
  return bytes.size();
}

namespace {

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v;
  std::memcpy(&v, b.data() + at, 4);
  return v;
}

}  // namespace

GlbChunkInfo inspect_glb(std::span<const std::uint8_t> b) {
  if (b.size() < 12) throw ParseError("glb: truncated header");
  if (get32(b, 0) != kMagic) throw ParseError("glb: bad magic");
  if (get32(b, 4) != 2) throw ParseError("glb: unsupported container version " + std::to_string(get32(b, 4)));
  GlbChunkInfo info;
  info.total_length = get32(b, 8);
  if (info.total_length != b.size())
    throw ParseError("glb: header length " + std::to_string(info.total_length) + " does not match " +
                     std::to_string(b.size()) + " bytes");
  if (b.size() < 20) throw ParseError("glb: truncated JSON chunk header");
  info.json_length = get32(b, 12);
  if (get32(b, 16) != kChunkJson) throw ParseError("glb: first chunk is not JSON");
  if (info.json_length % 4 != 0) throw ParseError("glb: JSON chunk not padded to 4 bytes");
  if (20 + static_cast<std::size_t>(info.json_length) > b.size()) throw ParseError("glb: truncated JSON chunk");
  info.json.assign(reinterpret_cast<const char*>(b.data() + 20), info.json_length);
  std::size_t at = 20 + info.json_length;
  if (at < b.size()) {
    if (at + 8 > b.size()) throw ParseError("glb: truncated BIN chunk header");
    info.bin_length = get32(b, at);
    if (get32(b, at + 4) != kChunkBin) throw ParseError("glb: second chunk is not BIN");
    if (info.bin_length % 4 != 0) throw ParseError("glb: BIN chunk not padded to 4 bytes");
    if (at + 8 + static_cast<std::size_t>(info.bin_length) != b.size())
      throw ParseError("glb: BIN chunk length does not match the file");
  }
  return info;
}

namespace {

struct AccessorView {
  const std::uint8_t* data;
  std::size_t count;
  std::size_t stride;
  int component_type;
  int components;
};

int type_components(const std::string& type) {
  if (type == "SCALAR") return 1;
  if (type == "VEC2") return 2;
  if (type == "VEC3") return 3;
  if (type == "VEC4") return 4;
  throw ParseError("glb: unsupported accessor type " + type);
}

int component_size(int ct) {
  switch (ct) {
    case kUnsignedByte: return 1;
    case kUnsignedShort: return 2;
    case kUnsignedInt: return 4;
    case kFloat: return 4;
    default: throw ParseError("glb: unsupported component type " + std::to_string(ct));
  }
}

std::span<const std::uint8_t> buffer_view(const Json& doc, std::span<const std::uint8_t> bin, int index) {
  const auto& v = doc.at("bufferViews").at(index);
  if (v.value("buffer", 0) != 0) throw ParseError("glb: external buffers are not supported");
  const std::size_t offset = v.value("byteOffset", std::size_t{0});
  const std::size_t length = v.at("byteLength").get<std::size_t>();
  if (offset + length > bin.size()) throw ParseError("glb: buffer view exceeds the BIN chunk");
  return bin.subspan(offset, length);
}

AccessorView accessor(const Json& doc, std::span<const std::uint8_t> bin, int index) {
  const auto& a = doc.at("accessors").at(index);
  AccessorView out;
  out.component_type = a.at("componentType").get<int>();
  out.components = type_components(a.at("type").get<std::string>());
  out.count = a.at("count").get<std::size_t>();
  const std::size_t elem = static_cast<std::size_t>(component_size(out.component_type)) * out.components;
  const auto view = buffer_view(doc, bin, a.at("bufferView").get<int>());
  const auto& v = doc.at("bufferViews").at(a.at("bufferView").get<int>());
  out.stride = v.value("byteStride", elem);
  const std::size_t offset = a.value("byteOffset", std::size_t{0});
  if (out.count > 0 && offset + (out.count - 1) * out.stride + elem > view.size())
    throw ParseError("glb: accessor exceeds its buffer view");
  out.data = view.data() + offset;
  return out;
}

std::vector<double> read_floats(const AccessorView& a, int expect_components) {
  if (a.component_type != kFloat || a.components != expect_components)
    throw ParseError("glb: unexpected accessor layout");
  std::vector<double> out(a.count * a.components);
  for (std::size_t i = 0; i < a.count; ++i)
    for (int c = 0; c < a.components; ++c) {
      float f;
      std::memcpy(&f, a.data + i * a.stride + c * 4, 4);
      out[i * a.components + c] = f;
    }
  return out;
}

std::optional<TextureImage> load_texture(const Json& doc, std::span<const std::uint8_t> bin, const Json& ref,
                                         bool srgb) {
  if (ref.is_null()) return std::nullopt;
  const int tex = ref.at("index").get<int>();
  const int src = doc.at("textures").at(tex).at("source").get<int>();
  const auto& img = doc.at("images").at(src);
  if (!img.contains("bufferView")) throw ParseError("glb: only embedded images are supported");
  return decode_png(buffer_view(doc, bin, img.at("bufferView").get<int>()), srgb);
}

}  // namespace

ImportedAsset parse_glb(std::span<const std::uint8_t> bytes) {
  const GlbChunkInfo info = inspect_glb(bytes);
  const std::span<const std::uint8_t> bin =
      info.bin_length ? bytes.subspan(20 + info.json_length + 8, info.bin_length) : std::span<const std::uint8_t>{};
  ImportedAsset out;
  try {
    const Json doc = Json::parse(info.json);
    if (doc.at("asset").at("version").get<std::string>().rfind("2.", 0) != 0)
      throw ParseError("glb: asset version is not 2.x");
    const auto& prim = doc.at("meshes").at(0).at("primitives").at(0);
    if (prim.value("mode", 4) != 4) throw ParseError("glb: only triangle lists are supported");
    const auto& attrs = prim.at("attributes");
    const AccessorView pa = accessor(doc, bin, attrs.at("POSITION").get<int>());
    const auto pos = read_floats(pa, 3);
    IndexedMesh& m = out.mesh;
    m.positions.resize(pa.count);
    for (std::size_t i = 0; i < pa.count; ++i) m.positions[i] = {pos[i * 3], pos[i * 3 + 1], pos[i * 3 + 2]};

    std::vector<std::uint32_t> idx;
    if (prim.contains("indices")) {
      const AccessorView ia = accessor(doc, bin, prim.at("indices").get<int>());
      if (ia.components != 1) throw ParseError("glb: indices must be scalar");
      const int size = component_size(ia.component_type);
      if (ia.component_type == kFloat) throw ParseError("glb: float indices");
      idx.resize(ia.count);
      for (std::size_t i = 0; i < ia.count; ++i) {
        std::uint32_t v = 0;
        std::memcpy(&v, ia.data + i * ia.stride, static_cast<std::size_t>(size));
        idx[i] = v;
      }
    } else {
      idx.resize(pa.count);
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    }
    if (idx.size() % 3 != 0) throw ParseError("glb: index count is not a multiple of 3");
    m.indices.resize(idx.size() / 3);
    for (std::size_t t = 0; t < m.indices.size(); ++t) {
      m.indices[t] = {idx[t * 3], idx[t * 3 + 1], idx[t * 3 + 2]};
      for (auto v : m.indices[t])
        if (v >= pa.count) throw ParseError("glb: index out of range");
    }
    if (attrs.contains("NORMAL")) {
      const AccessorView na = accessor(doc, bin, attrs.at("NORMAL").get<int>());
      if (na.count != pa.count) throw ParseError("glb: NORMAL count differs from POSITION");
      const auto n = read_floats(na, 3);
      m.vertex_normals.resize(na.count);
      for (std::size_t i = 0; i < na.count; ++i)
        m.vertex_normals[i] = Vec3{n[i * 3], n[i * 3 + 1], n[i * 3 + 2]};
    }
    if (attrs.contains("TEXCOORD_0")) {
      const AccessorView ta = accessor(doc, bin, attrs.at("TEXCOORD_0").get<int>());
      if (ta.count != pa.count) throw ParseError("glb: TEXCOORD_0 count differs from POSITION");
      const auto uv = read_floats(ta, 2);
      m.corner_uvs.resize(m.indices.size() * 3);
      for (std::size_t t = 0; t < m.indices.size(); ++t)
        for (int c = 0; c < 3; ++c) {
          const std::size_t v = m.indices[t][c];
          m.corner_uvs[t * 3 + c] = {uv[v * 2], 1.0 - uv[v * 2 + 1]};
        }
    }

    if (prim.contains("material")) {
      const auto& mat = doc.at("materials").at(prim.at("material").get<int>());
      const Json pbr = mat.value("pbrMetallicRoughness", Json::object());
      double metallic = pbr.value("metallicFactor", 1.0), roughness = pbr.value("roughnessFactor", 1.0);
      out.albedo = load_texture(doc, bin, pbr.value("baseColorTexture", Json()), true);
      out.normal = load_texture(doc, bin, mat.value("normalTexture", Json()), false);
      out.metallic_roughness = load_texture(doc, bin, pbr.value("metallicRoughnessTexture", Json()), false);
      if (mat.contains("extras") && mat.at("extras").contains("metallic")) {
        metallic = mat.at("extras").at("metallic").get<double>();
        roughness = mat.at("extras").at("roughness").get<double>();
      }
      out.material = make_material(metallic, roughness);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("glb: ") + e.what());
  }
  return out;
}

ImportedAsset import_glb(const std::filesystem::path& path) { return parse_glb(read_file_bytes(path)); }

}  // namespace meshfinish
