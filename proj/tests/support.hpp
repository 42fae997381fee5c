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

// Test-only generators and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include "squishdiff/diffusion.hpp"
#include "squishdiff/rng.hpp"
#include "squishdiff/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace squishdiff::testing {

/// Random rectilinear layout: 1..max_polygons rectangles, L-shapes and
/// U-shapes with interior-disjoint bounding boxes (touching is allowed).
inline LayoutPattern random_layout(Philox& rng, int max_polygons = 20, Coord window = 2048) {
  LayoutPattern out;
  out.width = window;
  out.height = window;
  const int target = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_polygons)));
  struct Box {
    Coord x0, y0, x1, y1;
  };
  std::vector<Box> boxes;
  auto coord = [&](Coord lo, Coord hi) { return lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
  for (int attempt = 0; attempt < 400 && static_cast<int>(out.polygons.size()) < target; ++attempt) {
    Coord x0 = coord(0, window - 8), y0 = coord(0, window - 8);
    const Coord span = std::max<Coord>(8, window / 4);
    Coord x1 = std::min(window, x0 + coord(4, span)), y1 = std::min(window, y0 + coord(4, span));
    // Snap to multiples of 4 now and then so touching boxes and shared scan lines occur.
    if (rng.below(2) == 0) {
      x0 -= x0 % 64;
      y0 -= y0 % 64;
      x1 = std::min(window, x1 + (64 - x1 % 64) % 64);
      y1 = std::min(window, y1 + (64 - y1 % 64) % 64);
    }
    if (x1 - x0 < 4 || y1 - y0 < 4) continue;
    const bool clash = std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) {
      return std::max(x0, b.x0) < std::min(x1, b.x1) && std::max(y0, b.y0) < std::min(y1, b.y1);
    });
    if (clash) continue;
    boxes.push_back({x0, y0, x1, y1});
    const Coord cx = x0 + 1 + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(x1 - x0 - 2)));
    const Coord cy = y0 + 1 + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(y1 - y0 - 2)));
    Polygon p;
    switch (rng.below(3)) {
      case 0:
        p = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        break;
      case 1:  // L: top-right corner removed
        p = {{x0, y0}, {x1, y0}, {x1, cy}, {cx, cy}, {cx, y1}, {x0, y1}};
        break;
      default: {  // U: notch from the top
        const Coord n0 = x0 + 1 + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(std::max<Coord>(1, (x1 - x0) / 2 - 1))));
        const Coord n1 = std::min(x1 - 1, n0 + 1 + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(std::max<Coord>(1, x1 - n0 - 2)))));
        if (n1 <= n0) {
          p = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        } else {
          p = {{x0, y0}, {x1, y0}, {x1, y1}, {n1, y1}, {n1, cy}, {n0, cy}, {n0, y1}, {x0, y1}};
        }
      }
    }
    out.polygons.push_back(std::move(p));
  }
  return out;
}

/// Covered cells of `layout` on the grid spanned by `xs` x `ys`, computed by
/// a crossing-number test at every cell centre.
inline std::vector<std::vector<bool>> covered_cells(const LayoutPattern& layout,
                                                    const std::vector<Coord>& xs,
                                                    const std::vector<Coord>& ys) {
  std::vector<std::vector<bool>> grid(ys.size() - 1, std::vector<bool>(xs.size() - 1, false));
  for (const auto& poly : layout.polygons) {
    Coord bx0 = poly[0].x, bx1 = poly[0].x, by0 = poly[0].y, by1 = poly[0].y;
    for (const auto& v : poly) {
      bx0 = std::min(bx0, v.x);
      bx1 = std::max(bx1, v.x);
      by0 = std::min(by0, v.y);
      by1 = std::max(by1, v.y);
    }
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const Coord cy2 = ys[j] + ys[j + 1];
      if (cy2 < 2 * by0 || cy2 > 2 * by1) continue;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const Coord cx2 = xs[i] + xs[i + 1];
        if (cx2 < 2 * bx0 || cx2 > 2 * bx1) continue;
        bool inside = false;
        for (std::size_t e = 0; e < poly.size(); ++e) {
          const Point& a = poly[e];
          const Point& b = poly[(e + 1) % poly.size()];
          if (a.x != b.x) continue;
          const Coord lo = 2 * std::min(a.y, b.y), hi = 2 * std::max(a.y, b.y);
          if (lo < cy2 && cy2 < hi && 2 * a.x > cx2) inside = !inside;
        }
        if (inside) grid[j][i] = true;
      }
    }
  }
  return grid;
}

/// Exact equality of the covered nm^2 point sets of two layouts.
inline bool same_covered_area(const LayoutPattern& a, const LayoutPattern& b) {
  if (a.width != b.width || a.height != b.height) return false;
  std::vector<Coord> xs{0, a.width}, ys{0, a.height};
  for (const auto* l : {&a, &b})
    for (const auto& p : l->polygons)
      for (const auto& v : p) {
        xs.push_back(v.x);
        ys.push_back(v.y);
      }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return covered_cells(a, xs, ys) == covered_cells(b, xs, ys);
}

/// Bayes posterior over x_{k-1} by enumerating its two values, with the
/// marginals q(x_{k-1} | x_0) obtained by stepping a probability vector
/// through the chain one transition at a time (no cumulative products).
inline std::array<double, 2> enumerate_posterior(int xk, int x0, const std::vector<double>& betas, int k) {
  std::array<double, 2> dist{0.0, 0.0};
  dist[x0] = 1.0;
  for (int s = 1; s <= k - 1; ++s) {
    const double b = betas[s - 1];
    dist = {dist[0] * (1 - b) + dist[1] * b, dist[0] * b + dist[1] * (1 - b)};
  }
  const double bk = betas[k - 1];
  std::array<double, 2> joint{};
  for (int prev = 0; prev < 2; ++prev) joint[prev] = dist[prev] * (prev == xk ? 1 - bk : bk);
  const double z = joint[0] + joint[1];
  return {joint[0] / z, joint[1] / z};
}

/// Random n x n topology made of separated rectangles and L-shapes (at least
/// one empty cell between distinct shapes). Never contains a bow-tie.
inline BinaryMatrix random_topology(Philox& rng, int n, int max_shapes = 4) {
  BinaryMatrix t = BinaryMatrix::Zero(n, n);
  BinaryMatrix halo = BinaryMatrix::Zero(n, n);  // cells occupied or adjacent to a shape
  const int shapes = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_shapes)));
  for (int s = 0, attempt = 0; s < shapes && attempt < 100; ++attempt) {
    const int r0 = static_cast<int>(rng.below(n)), c0 = static_cast<int>(rng.below(n));
    const int h = 1 + static_cast<int>(rng.below(std::max(1, n / 2)));
    const int w = 1 + static_cast<int>(rng.below(std::max(1, n / 2)));
    if (r0 + h > n || c0 + w > n) continue;
    BinaryMatrix shape = BinaryMatrix::Zero(n, n);
    shape.block(r0, c0, h, w).setOnes();
    // Optional second arm making an L.
    if (rng.below(2) == 0 && h > 1) {
      const int arm = 1 + static_cast<int>(rng.below(std::max(1, n / 3)));
      if (c0 + w + arm <= n) shape.block(r0, c0 + w, 1, arm).setOnes();
    }
    if (((shape.array() == 1) && (halo.array() == 1)).any()) continue;
    t = (t.array() == 1 || shape.array() == 1).cast<std::uint8_t>();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (!shape(r, c)) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr >= 0 && cc >= 0 && rr < n && cc < n) halo(rr, cc) = 1;
          }
      }
    ++s;
  }
  return t;
}

inline BinaryMatrix matrix(std::initializer_list<std::initializer_list<int>> rows) {
  BinaryMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (int v : row) m(r, c++) = static_cast<std::uint8_t>(v);
    ++r;
  }
  return m;
}

}  // namespace squishdiff::testing
