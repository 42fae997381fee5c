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

#include <vector>

namespace squishdiff {

/// Throws ValidationError naming the offending polygon index.
void validate_layout(const LayoutPattern& pattern);

/// Scan-line decomposition. Scan lines are the distinct polygon edge
/// coordinates plus the window boundaries; a cell is 1 iff its open interior
/// lies inside some polygon.
SquishPattern extract_squish(const LayoutPattern& pattern);

/// Merges each 4-connected component of 1-cells into one counterclockwise
/// boundary polygon. Components whose boundary is not a single simple ring
/// (enclosed holes, corner pinches) are emitted as a set of abutting
/// rectangles covering exactly the same area.
LayoutPattern reconstruct_layout(const SquishPattern& squish);

/// Throws ValidationError unless all deltas are positive and the shapes agree.
void validate_squish(const SquishPattern& squish);

/// Lossless padding to side x side: the largest interval on a deficient axis
/// (lowest index on ties) is split in two and its row/column duplicated.
SquishPattern pad_to_square(const SquishPattern& squish, int side);

/// Merges adjacent identical rows and columns (removes redundant scan lines).
SquishPattern remove_redundant_lines(const SquishPattern& squish);

/// Scan-line count minus one per axis after redundant-line removal. A pattern
/// without shapes has no scan lines and complexity (0, 0).
Complexity complexity(const SquishPattern& squish);

TopologyTensor fold(const BinaryMatrix& matrix, int channels);
BinaryMatrix unfold(const TopologyTensor& tensor);

/// 4-connected component labels of the 1-cells: -1 for 0-cells, otherwise
/// 0..count-1 in row-major order of first appearance.
struct ComponentLabels {
  Eigen::MatrixXi label;
  int count = 0;
};
ComponentLabels label_components(const BinaryMatrix& topology);

/// Scan-line positions (prefix sums of the deltas, starting at 0).
std::vector<Coord> scan_lines(const std::vector<Coord>& deltas);

}  // namespace squishdiff
