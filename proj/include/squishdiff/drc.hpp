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

#include "squishdiff/rules.hpp"
#include "squishdiff/types.hpp"

#include <string>
#include <vector>

namespace squishdiff {

/// Geometry-level design rule check working directly on polygons.
struct Violation {
  enum class Kind { space, width, area };
  Kind kind = Kind::space;
  /// One index for width/area, the (lower, higher) pair for space.
  std::vector<int> polygons;
  /// 'x' or 'y' for space/width, empty for area.
  char axis = 0;
  double measured = 0;
  double limit = 0;
};

std::string to_string(Violation::Kind kind);

/// Space: minimum gap between facing parallel edges of two distinct polygons
/// whose projections overlap, reported once per polygon pair and axis.
/// Width: minimum chord of each polygon's slab decomposition per axis.
/// Area: polygon area outside [area_min, area_max].
std::vector<Violation> check_drc(const LayoutPattern& pattern, const RuleSet& rules);

std::string violations_to_json(const std::vector<Violation>& violations);

}  // namespace squishdiff
