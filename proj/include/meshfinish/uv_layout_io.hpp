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

#pragma once

#include <filesystem>
#include <iosfwd>

#include "meshfinish/uv_unwrap.hpp"

namespace meshfinish {

// Binary layout container:
//   "MFUVLAY1" | u32 header length | JSON header | f64 corner uvs (u, v)
//   | u8 layer per triangle | u8 cube face per triangle
// All integers and floats little-endian.
void write_layout(std::ostream& out, const UvLayout& layout);
UvLayout read_layout(std::istream& in);

void save_layout(const std::filesystem::path& path, const UvLayout& layout);
UvLayout load_layout(const std::filesystem::path& path);

}  // namespace meshfinish
