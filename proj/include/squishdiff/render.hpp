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

#include <cstdint>
#include <filesystem>
#include <vector>

namespace squishdiff {

struct RenderOptions {
  int pixels = 512;
  bool grid_lines = false;
};

/// 8-bit grayscale raster, row 0 at the top (largest y). Shapes are black on
/// white; scan lines, when enabled, are drawn in mid gray.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

Raster rasterize(const LayoutPattern& layout, const RenderOptions& options = {});

void write_png(const std::filesystem::path& path, const Raster& raster);

}  // namespace squishdiff
