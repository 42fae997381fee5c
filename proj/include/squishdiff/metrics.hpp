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

#include <map>
#include <span>
#include <string>

namespace squishdiff {

struct DiversityReport {
  std::map<Complexity, double> histogram;
  std::map<Complexity, std::size_t> counts;
  double entropy_bits = 0;
  std::size_t pattern_count = 0;
};

/// Shannon entropy (bits) of a discrete distribution given by non-negative weights.
double entropy_bits(std::span<const double> weights);

/// Histogram of complexities with empirical probabilities and its entropy.
DiversityReport diversity(std::span<const SquishPattern> patterns);
DiversityReport diversity_of(std::span<const Complexity> complexities);

/// Fraction of patterns without DRC violations.
double legality_rate(std::span<const LayoutPattern> patterns, const RuleSet& rules);

std::string diversity_to_json(const DiversityReport& report);
/// CSV `c_x,c_y,count,probability`.
std::string histogram_to_csv(const DiversityReport& report);

}  // namespace squishdiff
