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

#include <string>

namespace squishdiff {

/// Design-rule constants. Lengths in nm, areas in nm^2. `window` is the
/// physical extent of the pattern along each axis.
struct RuleSet {
  Coord space_min = 100;
  Coord width_min = 100;
  Coord area_min = 10'000;
  Coord area_max = 2048LL * 2048LL;
  Coord window = 2048;
};

/// Throws ValidationError unless all values are positive, area_min <= area_max
/// and space_min, width_min <= window.
void validate(const RuleSet& rules);

/// Rules JSON: {"space_min", "width_min", "area_min", "area_max", "window"}, integers.
RuleSet rules_from_json(const std::string& text);
std::string rules_to_json(const RuleSet& rules);

}  // namespace squishdiff
