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

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace squishdiff {

enum class Axis { x, y };

/// Index range a..b (inclusive) of the delta vector on `axis`. `line` is the
/// row (for x) or column (for y) where the run was first seen.
struct Run {
  Axis axis = Axis::x;
  int line = 0;
  int a = 0;
  int b = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;
};

struct ConstraintSet {
  int rows = 0;
  int cols = 0;
  /// Deduplicated by (axis, a, b): the constraint only depends on the range.
  std::vector<Run> width_runs;
  std::vector<Run> space_runs;
  /// 4-connected components of 1-cells.
  std::vector<std::vector<Cell>> polygons;
};

struct PrefilterResult {
  bool accepted = true;
  std::string reason;
  explicit operator bool() const { return accepted; }
};

/// Rejects topologies containing a bow-tie 2x2 window ([[1,0],[0,1]] or
/// [[0,1],[1,0]]) or a shape component that fully encloses a space region
/// (such a component cannot be drawn as one simple polygon).
PrefilterResult prefilter(const BinaryMatrix& topology);

/// Run-length scan of every row (x runs) and column (y runs). The rule set
/// only selects the bounds later; extraction itself is rule-independent.
ConstraintSet extract_constraints(const BinaryMatrix& topology);
ConstraintSet extract_constraints(const BinaryMatrix& topology, const RuleSet& rules);

/// Start point for the solver.
struct Initializer {
  enum class Kind { random, library };
  Kind kind = Kind::random;
  /// Delta pairs for Kind::library; entries whose lengths do not match the
  /// topology are ignored.
  std::vector<std::pair<std::vector<Coord>, std::vector<Coord>>> library;

  static Initializer random() { return {}; }
  static Initializer from_library(std::vector<std::pair<std::vector<Coord>, std::vector<Coord>>> pairs) {
    return {Kind::library, std::move(pairs)};
  }
};

struct SolverOptions {
  int max_iterations = 10'000;
  double tolerance = 1e-6;
};

struct Solution {
  enum class Status { solved, infeasible };
  Status status = Status::infeasible;
  std::vector<Coord> delta_x;
  std::vector<Coord> delta_y;
  Eigen::VectorXd real_x;
  Eigen::VectorXd real_y;
  int iterations = 0;
  double residual = 0.0;
  std::string initializer;
  std::string reason;

  bool solved() const { return status == Status::solved; }
};

/// Finds deltas with: every delta >= 1 nm; each axis summing to the window;
/// width runs >= width_min; space runs >= space_min; each polygon's area in
/// [area_min, area_max]. Phase 1 projects the start point onto the linear
/// constraint polytope (Dykstra); phase 2 rescales rows/columns of polygons
/// whose area is out of range and re-projects. The integer result is
/// re-verified exactly. Deterministic for fixed inputs and seed.
Solution solve(const BinaryMatrix& topology, const RuleSet& rules,
               const ConstraintSet& constraints, const Initializer& initializer,
               std::uint64_t seed, const SolverOptions& options = {});

/// Exact integer check of a candidate solution against all constraint families.
bool satisfies(const BinaryMatrix& topology, const RuleSet& rules,
               const ConstraintSet& constraints, const std::vector<Coord>& delta_x,
               const std::vector<Coord>& delta_y);

struct SolveManyResult {
  std::vector<Solution> solutions;
  /// Every delta is forced by the sum constraints; at most one solution exists.
  bool fully_determined = false;
  /// Fewer than the requested number of distinct solutions were found.
  bool partial = false;
};

/// Up to n pairwise-distinct (after rounding) solutions from randomized restarts.
SolveManyResult solve_many(const BinaryMatrix& topology, const RuleSet& rules, int n,
                           std::uint64_t seed, const Initializer& initializer = {},
                           const SolverOptions& options = {});

}  // namespace squishdiff
