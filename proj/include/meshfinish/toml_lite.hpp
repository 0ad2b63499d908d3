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

#include "json.hpp"

namespace meshfinish {

// Reads the TOML subset used by pipeline configs into JSON: comments,
// [table] and [a.b] headers, bare or quoted keys, basic and literal strings,
// integers, floats, booleans and single-line arrays of those. Anything else
// is a ParseError carrying the line number.
nlohmann::json parse_toml_lite(std::string_view text);

}  // namespace meshfinish
