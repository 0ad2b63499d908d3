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

#include <string_view>

#include "meshfinish/baker.hpp"

namespace meshfinish {

// Built-in procedural fields standing in for a learned texture decoder.
//
// Albedo specs:
//   constant:r,g,b          uniform colour
//   checker:period          two-tone checker keyed on world x, y, z
//   checker_x:period        stripes keyed on world x only
//   gradient                smooth ramp over the unit cube
//   position                0.5 + 0.5 * p, clamped
//   bands:period            smooth sinusoidal bands
// Normal specs:
//   geometry                the interpolated geometry normal
//   bumps:amplitude,freq    geometry normal tilted by a sinusoidal height field
FieldSampler make_albedo_field(std::string_view spec);
FieldSampler make_normal_field(std::string_view spec);

}  // namespace meshfinish
