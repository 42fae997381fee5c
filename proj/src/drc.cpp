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

#include "squishdiff/drc.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <optional>

namespace squishdiff {

namespace {

// Axis-parallel polygon edge; `lo`/`hi` span the edge, `pos` is its fixed
// coordinate. `interior_after` is true when the polygon interior lies on the
// side of larger coordinates (a left or bottom boundary).
struct Edge {
  Coord pos, lo, hi;
  bool interior_after;
};

struct PolygonEdges {
  std::vector<Edge> vertical;    // pos = x
  std::vector<Edge> horizontal;  // pos = y
};

Coord twice_signed_area(const Polygon& poly) {
  Coord a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

PolygonEdges edges_of(const Polygon& poly) {
  PolygonEdges out;
  const bool ccw = twice_signed_area(poly) > 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    if (p.x == q.x && p.y != q.y) {
      // Counterclockwise: going down means the interior is to the right.
      const bool down = q.y < p.y;
      out.vertical.push_back({p.x, std::min(p.y, q.y), std::max(p.y, q.y), down == ccw});
    } else if (p.y == q.y && p.x != q.x) {
      // Counterclockwise: going right means the interior is above.
      const bool right = q.x > p.x;
      out.horizontal.push_back({p.y, std::min(p.x, q.x), std::max(p.x, q.x), right == ccw});
    }
  }
  return out;
}

// Smallest gap from a boundary of `a` with interior before it to a boundary of
// `b` with interior after it, over edges with overlapping open projections.
std::optional<Coord> facing_gap(const std::vector<Edge>& a, const std::vector<Edge>& b) {
  std::optional<Coord> best;
  for (const Edge& e : a) {
    if (e.interior_after) continue;
    for (const Edge& f : b) {
      if (!f.interior_after || f.pos < e.pos) continue;
      if (std::max(e.lo, f.lo) >= std::min(e.hi, f.hi)) continue;
      const Coord gap = f.pos - e.pos;
      if (!best || gap < *best) best = gap;
    }
  }
  return best;
}

std::optional<Coord> min_gap(const std::vector<Edge>& a, const std::vector<Edge>& b) {
  const auto ab = facing_gap(a, b);
  const auto ba = facing_gap(b, a);
  if (ab && ba) return std::min(*ab, *ba);
  return ab ? ab : ba;
}

// Minimum chord length across slabs between consecutive edge coordinates.
// `cutting` are edges perpendicular to the chords, `slab_edges` define slabs.
std::optional<Coord> min_chord(const std::vector<Edge>& cutting, const std::vector<Edge>& slab_edges) {
  std::vector<Coord> levels;
  for (const Edge& e : slab_edges) levels.push_back(e.pos);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::optional<Coord> best;
  std::vector<Coord> hits;
  for (std::size_t s = 0; s + 1 < levels.size(); ++s) {
    const Coord mid2 = levels[s] + levels[s + 1];
    hits.clear();
    for (const Edge& e : cutting)
      if (2 * e.lo < mid2 && mid2 < 2 * e.hi) hits.push_back(e.pos);
    std::sort(hits.begin(), hits.end());
    for (std::size_t i = 0; i + 1 < hits.size(); i += 2) {
      const Coord chord = hits[i + 1] - hits[i];
      if (!best || chord < *best) best = chord;
    }
  }
  return best;
}

}  // namespace

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::space: return "space";
    case Violation::Kind::width: return "width";
    case Violation::Kind::area: return "area";
  }
  return "unknown";
}

std::vector<Violation> check_drc(const LayoutPattern& pattern, const RuleSet& rules) {
  std::vector<PolygonEdges> edges;
  edges.reserve(pattern.polygons.size());
  for (const auto& poly : pattern.polygons) edges.push_back(edges_of(poly));

  std::vector<Violation> out;
  const int n = static_cast<int>(pattern.polygons.size());
  for (int i = 0; i < n; ++i) {
    const auto wx = min_chord(edges[i].vertical, edges[i].horizontal);
    if (wx && *wx < rules.width_min)
      out.push_back({Violation::Kind::width, {i}, 'x', double(*wx), double(rules.width_min)});
    const auto wy = min_chord(edges[i].horizontal, edges[i].vertical);
    if (wy && *wy < rules.width_min)
      out.push_back({Violation::Kind::width, {i}, 'y', double(*wy), double(rules.width_min)});
    const Coord area = std::llabs(twice_signed_area(pattern.polygons[i])) / 2;
    if (area < rules.area_min)
      out.push_back({Violation::Kind::area, {i}, 0, double(area), double(rules.area_min)});
    else if (area > rules.area_max)
      out.push_back({Violation::Kind::area, {i}, 0, double(area), double(rules.area_max)});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto gx = min_gap(edges[i].vertical, edges[j].vertical);
      if (gx && *gx < rules.space_min)
        out.push_back({Violation::Kind::space, {i, j}, 'x', double(*gx), double(rules.space_min)});
      const auto gy = min_gap(edges[i].horizontal, edges[j].horizontal);
      if (gy && *gy < rules.space_min)
        out.push_back({Violation::Kind::space, {i, j}, 'y', double(*gy), double(rules.space_min)});
    }
  }
  return out;
}

std::string violations_to_json(const std::vector<Violation>& violations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    nlohmann::json item = {{"kind", to_string(v.kind)},
                           {"polygons", v.polygons},
                           {"measured", v.measured},
                           {"limit", v.limit}};
    if (v.axis) item["axis"] = std::string(1, v.axis);
    arr.push_back(std::move(item));
  }
  return arr.dump(2) + "\n";
}

}  // namespace squishdiff
