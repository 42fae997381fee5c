/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The squishdiff Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "squishdiff/types.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace squishdiff {

/// Layout JSON:
///   { "units": "nm", "window": [w, h], "polygons": [ [[x, y], ...], ... ] }
LayoutPattern layout_from_json(const std::string& text);
std::string layout_to_json(const LayoutPattern& layout);

/// Topology text: "H W" header, then H lines of W characters in {0,1};
/// the first line after the header is row 0 (smallest y).
BinaryMatrix topology_from_text(const std::string& text);
std::string topology_to_text(const BinaryMatrix& topology);

/// Deltas text: delta_x on the first line, delta_y on the second, space separated.
std::pair<std::vector<Coord>, std::vector<Coord>> deltas_from_text(const std::string& text);
std::string deltas_to_text(const std::vector<Coord>& delta_x, const std::vector<Coord>& delta_y);

/// Delta library: consecutive (delta_x, delta_y) line pairs in the deltas
/// format. Blank lines and `#` comments are ignored.
using DeltaLibrary = std::vector<std::pair<std::vector<Coord>, std::vector<Coord>>>;
DeltaLibrary delta_library_from_text(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace squishdiff
