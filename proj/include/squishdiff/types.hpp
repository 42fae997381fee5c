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

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace squishdiff {

/// Binary topology matrix. Row index is y (bottom to top), column index is x
/// (left to right). Entries are 0 (space) or 1 (shape).
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

using Coord = std::int64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Counterclockwise vertex ring with axis-parallel edges; the closing edge is implicit.
using Polygon = std::vector<Point>;

struct LayoutPattern {
  Coord width = 0;
  Coord height = 0;
  std::vector<Polygon> polygons;
};

/// Squish encoding: topology(j, i) covers [x_i, x_{i+1}] x [y_j, y_{j+1}],
/// with delta_x[i] = x_{i+1} - x_i and delta_y[j] = y_{j+1} - y_j.
struct SquishPattern {
  BinaryMatrix topology;
  std::vector<Coord> delta_x;
  std::vector<Coord> delta_y;

  Eigen::Index rows() const { return topology.rows(); }
  Eigen::Index cols() const { return topology.cols(); }

  friend bool operator==(const SquishPattern& a, const SquishPattern& b) {
    return a.delta_x == b.delta_x && a.delta_y == b.delta_y &&
           a.topology.rows() == b.topology.rows() && a.topology.cols() == b.topology.cols() &&
           a.topology == b.topology;
  }
};

/// C-channel folded topology (deep squish). Stored as a C x (M*M) matrix;
/// column u*M + v holds spatial cell (u, v).
struct TopologyTensor {
  int channels = 0;
  int side = 0;
  BinaryMatrix data;

  TopologyTensor() = default;
  TopologyTensor(int c, int m) : channels(c), side(m), data(BinaryMatrix::Zero(c, m * m)) {}

  std::uint8_t& at(int c, int u, int v) { return data(c, u * side + v); }
  std::uint8_t at(int c, int u, int v) const { return data(c, u * side + v); }
  Eigen::Index size() const { return data.size(); }

  friend bool operator==(const TopologyTensor& a, const TopologyTensor& b) {
    return a.channels == b.channels && a.side == b.side && a.data == b.data;
  }
};

struct Complexity {
  int c_x = 0;
  int c_y = 0;
  friend auto operator<=>(const Complexity&, const Complexity&) = default;
};

}  // namespace squishdiff
