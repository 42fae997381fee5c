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

#include "squishdiff/render.hpp"

#include "squishdiff/errors.hpp"
#include "squishdiff/squish.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>

namespace squishdiff {

Raster rasterize(const LayoutPattern& layout, const RenderOptions& options) {
  if (options.pixels <= 0) throw ParameterError("render size must be positive");
  const SquishPattern squish = extract_squish(layout);
  const std::vector<Coord> xs = scan_lines(squish.delta_x);
  const std::vector<Coord> ys = scan_lines(squish.delta_y);
  Raster r;
  r.width = options.pixels;
  r.height = options.pixels;
  r.pixels.assign(static_cast<std::size_t>(r.width) * r.height, 255);
  auto cell_of = [](const std::vector<Coord>& lines, double v) {
    const auto it = std::upper_bound(lines.begin(), lines.end(), v);
    return std::clamp<Eigen::Index>((it - lines.begin()) - 1, 0, static_cast<Eigen::Index>(lines.size()) - 2);
  };
  const double sx = static_cast<double>(layout.width) / r.width;
  const double sy = static_cast<double>(layout.height) / r.height;
  for (int py = 0; py < r.height; ++py) {
    const double y = (r.height - 1 - py + 0.5) * sy;
    const Eigen::Index row = cell_of(ys, y);
    for (int px = 0; px < r.width; ++px) {
      const double x = (px + 0.5) * sx;
      if (squish.topology(row, cell_of(xs, x))) r.pixels[static_cast<std::size_t>(py) * r.width + px] = 0;
    }
  }
  if (options.grid_lines) {
    for (Coord x : xs) {
      const int px = std::clamp(static_cast<int>(x / sx), 0, r.width - 1);
      for (int py = 0; py < r.height; ++py) r.pixels[static_cast<std::size_t>(py) * r.width + px] = 128;
    }
    for (Coord y : ys) {
      const int py = std::clamp(r.height - 1 - static_cast<int>(y / sy), 0, r.height - 1);
      for (int px = 0; px < r.width; ++px) r.pixels[static_cast<std::size_t>(py) * r.width + px] = 128;
    }
  }
  return r;
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw ValidationError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, raster.width, raster.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < raster.height; ++y)
    png_write_row(png, raster.pixels.data() + static_cast<std::size_t>(y) * raster.width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace squishdiff
