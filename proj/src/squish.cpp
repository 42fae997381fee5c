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

#include "squishdiff/squish.hpp"

#include "squishdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace squishdiff {

namespace {

std::string polygon_error(std::size_t index, const std::string& what) {
  return "polygon " + std::to_string(index) + ": " + what;
}

std::vector<Coord> sorted_unique(std::vector<Coord> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Eigen::Index index_of(const std::vector<Coord>& lines, Coord value) {
  return std::lower_bound(lines.begin(), lines.end(), value) - lines.begin();
}

struct VerticalEdge {
  Coord x, y_lo, y_hi;
};

// Boundary vertex on the (cols+1) x (rows+1) lattice of scan-line indices.
struct LatticePoint {
  int i = 0;  // x index
  int j = 0;  // y index
  auto operator<=>(const LatticePoint&) const = default;
};

struct DirectedEdge {
  LatticePoint from, to;
};

int direction_of(const DirectedEdge& e) {
  // 0:+x 1:+y 2:-x 3:-y
  if (e.to.i > e.from.i) return 0;
  if (e.to.j > e.from.j) return 1;
  if (e.to.i < e.from.i) return 2;
  return 3;
}

// Emits cells of one component as rectangles: row runs merged vertically.
void emit_rectangles(const ComponentLabels& labels, int component, const std::vector<Coord>& xs,
                     const std::vector<Coord>& ys, std::vector<Polygon>& out) {
  const Eigen::Index rows = labels.label.rows();
  const Eigen::Index cols = labels.label.cols();
  struct Open {
    Eigen::Index a, b, row_start;
  };
  std::vector<Open> open;
  auto close = [&](const Open& r, Eigen::Index row_end) {
    const Coord x0 = xs[r.a], x1 = xs[r.b + 1], y0 = ys[r.row_start], y1 = ys[row_end];
    out.push_back({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  };
  for (Eigen::Index r = 0; r <= rows; ++r) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
    if (r < rows) {
      for (Eigen::Index c = 0; c < cols;) {
        if (labels.label(r, c) != component) {
          ++c;
          continue;
        }
        Eigen::Index e = c;
        while (e + 1 < cols && labels.label(r, e + 1) == component) ++e;
        runs.emplace_back(c, e);
        c = e + 1;
      }
    }
    std::vector<Open> next;
    for (const auto& o : open) {
      auto it = std::find(runs.begin(), runs.end(), std::make_pair(o.a, o.b));
      if (it != runs.end()) {
        next.push_back(o);
        runs.erase(it);
      } else {
        close(o, r);
      }
    }
    for (const auto& run : runs) next.push_back({run.first, run.second, r});
    open = std::move(next);
  }
}

}  // namespace

std::vector<Coord> scan_lines(const std::vector<Coord>& deltas) {
  std::vector<Coord> lines(deltas.size() + 1, 0);
  std::partial_sum(deltas.begin(), deltas.end(), lines.begin() + 1);
  return lines;
}

void validate_layout(const LayoutPattern& pattern) {
  if (pattern.width <= 0 || pattern.height <= 0)
    throw ValidationError("window dimensions must be positive");
  for (std::size_t p = 0; p < pattern.polygons.size(); ++p) {
    const Polygon& poly = pattern.polygons[p];
    if (poly.size() < 4) throw ValidationError(polygon_error(p, "fewer than 4 vertices"));
    if (poly.size() % 2 != 0) throw ValidationError(polygon_error(p, "odd vertex count"));
    for (std::size_t v = 0; v < poly.size(); ++v) {
      const Point& a = poly[v];
      const Point& b = poly[(v + 1) % poly.size()];
      const Point& c = poly[(v + 2) % poly.size()];
      if (a.x < 0 || a.y < 0 || a.x > pattern.width || a.y > pattern.height)
        throw ValidationError(polygon_error(p, "vertex " + std::to_string(v) + " outside window"));
      const bool horizontal = a.y == b.y && a.x != b.x;
      const bool vertical = a.x == b.x && a.y != b.y;
      if (!horizontal && !vertical)
        throw ValidationError(
            polygon_error(p, "edge " + std::to_string(v) + " is diagonal or degenerate"));
      const bool next_horizontal = b.y == c.y;
      if (horizontal == next_horizontal)
        throw ValidationError(
            polygon_error(p, "edges " + std::to_string(v) + " and " +
                                 std::to_string((v + 1) % poly.size()) + " do not alternate"));
    }
  }
}

void validate_squish(const SquishPattern& squish) {
  if (squish.topology.rows() != static_cast<Eigen::Index>(squish.delta_y.size()) ||
      squish.topology.cols() != static_cast<Eigen::Index>(squish.delta_x.size()))
    throw ValidationError("topology shape does not match delta vector lengths");
  if (squish.delta_x.empty() || squish.delta_y.empty())
    throw ValidationError("empty delta vector");
  for (Coord d : squish.delta_x)
    if (d <= 0) throw ValidationError("non-positive delta_x entry " + std::to_string(d));
  for (Coord d : squish.delta_y)
    if (d <= 0) throw ValidationError("non-positive delta_y entry " + std::to_string(d));
  if ((squish.topology.array() > 1).any())
    throw ValidationError("topology entries must be 0 or 1");
}

SquishPattern extract_squish(const LayoutPattern& pattern) {
  validate_layout(pattern);
  std::vector<Coord> xs{0, pattern.width};
  std::vector<Coord> ys{0, pattern.height};
  for (const auto& poly : pattern.polygons)
    for (const auto& pt : poly) {
      xs.push_back(pt.x);
      ys.push_back(pt.y);
    }
  xs = sorted_unique(std::move(xs));
  ys = sorted_unique(std::move(ys));

  SquishPattern out;
  const Eigen::Index nx = static_cast<Eigen::Index>(xs.size()) - 1;
  const Eigen::Index ny = static_cast<Eigen::Index>(ys.size()) - 1;
  out.topology = BinaryMatrix::Zero(ny, nx);
  for (Eigen::Index i = 0; i < nx; ++i) out.delta_x.push_back(xs[i + 1] - xs[i]);
  for (Eigen::Index j = 0; j < ny; ++j) out.delta_y.push_back(ys[j + 1] - ys[j]);

  std::vector<VerticalEdge> edges;
  std::vector<Coord> crossings;
  for (const auto& poly : pattern.polygons) {
    edges.clear();
    for (std::size_t v = 0; v < poly.size(); ++v) {
      const Point& a = poly[v];
      const Point& b = poly[(v + 1) % poly.size()];
      if (a.x == b.x) edges.push_back({a.x, std::min(a.y, b.y), std::max(a.y, b.y)});
    }
    // Even-odd fill at each row's mid-height (doubled to stay integral).
    for (Eigen::Index j = 0; j < ny; ++j) {
      const Coord mid2 = ys[j] + ys[j + 1];
      crossings.clear();
      for (const auto& e : edges)
        if (2 * e.y_lo < mid2 && mid2 < 2 * e.y_hi) crossings.push_back(e.x);
      std::sort(crossings.begin(), crossings.end());
      for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
        const Eigen::Index i0 = index_of(xs, crossings[c]);
        const Eigen::Index i1 = index_of(xs, crossings[c + 1]);
        for (Eigen::Index i = i0; i < i1; ++i) out.topology(j, i) = 1;
      }
    }
  }
  return out;
}

ComponentLabels label_components(const BinaryMatrix& topology) {
  ComponentLabels out;
  out.label = Eigen::MatrixXi::Constant(topology.rows(), topology.cols(), -1);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index r = 0; r < topology.rows(); ++r) {
    for (Eigen::Index c = 0; c < topology.cols(); ++c) {
      if (topology(r, c) == 0 || out.label(r, c) >= 0) continue;
      const int id = out.count++;
      out.label(r, c) = id;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        auto [y, x] = stack.back();
        stack.pop_back();
        const Eigen::Index ny[4] = {y - 1, y + 1, y, y};
        const Eigen::Index nx[4] = {x, x, x - 1, x + 1};
        for (int n = 0; n < 4; ++n) {
          if (ny[n] < 0 || nx[n] < 0 || ny[n] >= topology.rows() || nx[n] >= topology.cols())
            continue;
          if (topology(ny[n], nx[n]) == 0 || out.label(ny[n], nx[n]) >= 0) continue;
          out.label(ny[n], nx[n]) = id;
          stack.emplace_back(ny[n], nx[n]);
        }
      }
    }
  }
  return out;
}

LayoutPattern reconstruct_layout(const SquishPattern& squish) {
  validate_squish(squish);
  const std::vector<Coord> xs = scan_lines(squish.delta_x);
  const std::vector<Coord> ys = scan_lines(squish.delta_y);
  LayoutPattern out;
  out.width = xs.back();
  out.height = ys.back();

  const ComponentLabels labels = label_components(squish.topology);
  const Eigen::Index rows = squish.topology.rows();
  const Eigen::Index cols = squish.topology.cols();
  auto inside = [&](Eigen::Index r, Eigen::Index c, int id) {
    return r >= 0 && c >= 0 && r < rows && c < cols && labels.label(r, c) == id;
  };

  for (int id = 0; id < labels.count; ++id) {
    // Counterclockwise boundary edges, interior on the left.
    std::multimap<LatticePoint, DirectedEdge> outgoing;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (labels.label(r, c) != id) continue;
        const int i = static_cast<int>(c), j = static_cast<int>(r);
        auto add = [&](LatticePoint a, LatticePoint b) { outgoing.emplace(a, DirectedEdge{a, b}); };
        if (!inside(r - 1, c, id)) add({i, j}, {i + 1, j});
        if (!inside(r, c + 1, id)) add({i + 1, j}, {i + 1, j + 1});
        if (!inside(r + 1, c, id)) add({i + 1, j + 1}, {i, j + 1});
        if (!inside(r, c - 1, id)) add({i, j + 1}, {i, j});
      }
    }

    bool pinched = false;
    for (auto it = outgoing.begin(); it != outgoing.end(); ++it)
      if (outgoing.count(it->first) > 1) pinched = true;

    std::vector<std::vector<LatticePoint>> loops;
    while (!pinched && !outgoing.empty()) {
      DirectedEdge e = outgoing.begin()->second;
      outgoing.erase(outgoing.begin());
      const LatticePoint start = e.from;
      const int first_dir = direction_of(e);
      int prev_dir = first_dir;
      std::vector<LatticePoint> loop{start};
      while (e.to != start) {
        auto it = outgoing.find(e.to);
        const DirectedEdge next = it->second;
        outgoing.erase(it);
        const int dir = direction_of(next);
        if (dir != prev_dir) loop.push_back(next.from);
        prev_dir = dir;
        e = next;
      }
      // The start vertex is not a corner when the loop closes straight into it.
      if (prev_dir == first_dir) loop.erase(loop.begin());
      loops.push_back(std::move(loop));
    }

    if (pinched || loops.size() != 1) {
      emit_rectangles(labels, id, xs, ys, out.polygons);
      continue;
    }
    Polygon poly;
    poly.reserve(loops[0].size());
    for (const auto& v : loops[0]) poly.push_back({xs[v.i], ys[v.j]});
    out.polygons.push_back(std::move(poly));
  }
  return out;
}

SquishPattern pad_to_square(const SquishPattern& squish, int side) {
  validate_squish(squish);
  if (side <= 0) throw ParameterError("pad side must be positive");
  if (squish.cols() > side || squish.rows() > side)
    throw CapacityError("topology " + std::to_string(squish.rows()) + "x" +
                        std::to_string(squish.cols()) + " exceeds side " + std::to_string(side));
  SquishPattern out = squish;
  auto split_largest = [](std::vector<Coord>& deltas) -> Eigen::Index {
    const auto it = std::max_element(deltas.begin(), deltas.end());
    if (*it < 2) throw CapacityError("no interval long enough to split");
    const Eigen::Index idx = it - deltas.begin();
    const Coord left = *it / 2;
    const Coord right = *it - left;
    deltas[idx] = left;
    deltas.insert(deltas.begin() + idx + 1, right);
    return idx;
  };
  while (out.cols() < side) {
    const Eigen::Index idx = split_largest(out.delta_x);
    BinaryMatrix t(out.rows(), out.cols() + 1);
    t.leftCols(idx + 1) = out.topology.leftCols(idx + 1);
    t.rightCols(out.cols() - idx) = out.topology.rightCols(out.cols() - idx);
    out.topology = std::move(t);
  }
  while (out.rows() < side) {
    const Eigen::Index idx = split_largest(out.delta_y);
    BinaryMatrix t(out.rows() + 1, out.cols());
    t.topRows(idx + 1) = out.topology.topRows(idx + 1);
    t.bottomRows(out.rows() - idx) = out.topology.bottomRows(out.rows() - idx);
    out.topology = std::move(t);
  }
  return out;
}

SquishPattern remove_redundant_lines(const SquishPattern& squish) {
  validate_squish(squish);
  SquishPattern out;
  std::vector<Eigen::Index> keep_cols{0};
  out.delta_x.push_back(squish.delta_x[0]);
  for (Eigen::Index c = 1; c < squish.cols(); ++c) {
    if (squish.topology.col(c) == squish.topology.col(keep_cols.back())) {
      out.delta_x.back() += squish.delta_x[c];
    } else {
      keep_cols.push_back(c);
      out.delta_x.push_back(squish.delta_x[c]);
    }
  }
  std::vector<Eigen::Index> keep_rows{0};
  out.delta_y.push_back(squish.delta_y[0]);
  for (Eigen::Index r = 1; r < squish.rows(); ++r) {
    if (squish.topology.row(r) == squish.topology.row(keep_rows.back())) {
      out.delta_y.back() += squish.delta_y[r];
    } else {
      keep_rows.push_back(r);
      out.delta_y.push_back(squish.delta_y[r]);
    }
  }
  out.topology = squish.topology(keep_rows, keep_cols);
  return out;
}

Complexity complexity(const SquishPattern& squish) {
  const SquishPattern reduced = remove_redundant_lines(squish);
  if ((reduced.topology.array() == 0).all()) return {0, 0};
  return {static_cast<int>(reduced.cols()), static_cast<int>(reduced.rows())};
}

namespace {

int patch_side(int channels) {
  if (channels <= 0) throw ShapeError("channel count must be positive");
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(channels))));
  if (s * s != channels) throw ShapeError("channel count " + std::to_string(channels) +
                                          " is not a perfect square");
  return s;
}

}  // namespace

TopologyTensor fold(const BinaryMatrix& matrix, int channels) {
  const int s = patch_side(channels);
  if (matrix.rows() != matrix.cols())
    throw ShapeError("fold expects a square matrix");
  if (matrix.rows() == 0 || matrix.rows() % s != 0)
    throw ShapeError("matrix side " + std::to_string(matrix.rows()) + " not divisible by " +
                     std::to_string(s));
  const int m = static_cast<int>(matrix.rows()) / s;
  TopologyTensor out(channels, m);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v)
      for (int c = 0; c < channels; ++c) out.at(c, u, v) = matrix(u * s + c / s, v * s + c % s);
  return out;
}

BinaryMatrix unfold(const TopologyTensor& tensor) {
  const int s = patch_side(tensor.channels);
  const int m = tensor.side;
  if (tensor.data.rows() != tensor.channels || tensor.data.cols() != m * m)
    throw ShapeError("tensor storage does not match its declared shape");
  BinaryMatrix out(s * m, s * m);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v)
      for (int c = 0; c < tensor.channels; ++c) out(u * s + c / s, v * s + c % s) = tensor.at(c, u, v);
  return out;
}

}  // namespace squishdiff
