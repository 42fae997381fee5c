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

#include "squishdiff/metrics.hpp"

#include "squishdiff/drc.hpp"
#include "squishdiff/errors.hpp"
#include "squishdiff/squish.hpp"

#include <json.hpp>

#include <cmath>
#include <vector>

namespace squishdiff {

double entropy_bits(std::span<const double> weights) {
  double total = 0;
  for (double w : weights) {
    if (w < 0) throw ParameterError("negative histogram weight");
    total += w;
  }
  if (!(total > 0)) throw ParameterError("histogram has no mass");
  double h = 0;
  for (double w : weights) {
    if (w == 0) continue;
    const double p = w / total;
    h -= p * std::log2(p);
  }
  return h;
}

DiversityReport diversity_of(std::span<const Complexity> complexities) {
  if (complexities.empty()) throw ParameterError("diversity needs at least one pattern");
  DiversityReport report;
  report.pattern_count = complexities.size();
  for (const auto& c : complexities) ++report.counts[c];
  std::vector<double> weights;
  for (const auto& [c, count] : report.counts) {
    report.histogram[c] = static_cast<double>(count) / static_cast<double>(complexities.size());
    weights.push_back(static_cast<double>(count));
  }
  report.entropy_bits = entropy_bits(weights);
  return report;
}

DiversityReport diversity(std::span<const SquishPattern> patterns) {
  std::vector<Complexity> cs;
  cs.reserve(patterns.size());
  for (const auto& p : patterns) cs.push_back(complexity(p));
  return diversity_of(cs);
}

double legality_rate(std::span<const LayoutPattern> patterns, const RuleSet& rules) {
  if (patterns.empty()) throw ParameterError("legality_rate needs at least one pattern");
  std::size_t legal = 0;
  for (const auto& p : patterns)
    if (check_drc(p, rules).empty()) ++legal;
  return static_cast<double>(legal) / static_cast<double>(patterns.size());
}

std::string diversity_to_json(const DiversityReport& report) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& [c, p] : report.histogram)
    bins.push_back({{"c_x", c.c_x}, {"c_y", c.c_y}, {"count", report.counts.at(c)}, {"probability", p}});
  nlohmann::json doc = {{"pattern_count", report.pattern_count},
                        {"entropy_bits", report.entropy_bits},
                        {"histogram", bins}};
  return doc.dump(2) + "\n";
}

std::string histogram_to_csv(const DiversityReport& report) {
  std::string out = "c_x,c_y,count,probability\n";
  for (const auto& [c, p] : report.histogram) {
    char line[128];
    std::snprintf(line, sizeof(line), "%d,%d,%zu,%.17g\n", c.c_x, c.c_y, report.counts.at(c), p);
    out += line;
  }
  return out;
}

}  // namespace squishdiff
