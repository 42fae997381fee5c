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

#include "squishdiff/legalizer.hpp"

#include "squishdiff/errors.hpp"
#include "squishdiff/rng.hpp"
#include "squishdiff/squish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace squishdiff {

using Eigen::Index;
using Eigen::VectorXd;

PrefilterResult prefilter(const BinaryMatrix& topology) {
  for (Index r = 0; r + 1 < topology.rows(); ++r) {
    for (Index c = 0; c + 1 < topology.cols(); ++c) {
      const int a = topology(r, c), b = topology(r, c + 1);
      const int d = topology(r + 1, c), e = topology(r + 1, c + 1);
      if (a == e && b == d && a != b)
        return {false, "bow-tie at (" + std::to_string(r) + "," + std::to_string(c) + ")"};
    }
  }
  // A space region that never reaches the border is enclosed by one shape.
  const BinaryMatrix inverted = (topology.array() == 0).cast<std::uint8_t>();
  const ComponentLabels spaces = label_components(inverted);
  std::vector<bool> open(spaces.count, false);
  for (Index r = 0; r < topology.rows(); ++r)
    for (Index c = 0; c < topology.cols(); ++c) {
      const int id = spaces.label(r, c);
      if (id >= 0 && (r == 0 || c == 0 || r + 1 == topology.rows() || c + 1 == topology.cols()))
        open[id] = true;
    }
  for (int id = 0; id < spaces.count; ++id)
    if (!open[id]) return {false, "enclosed space region " + std::to_string(id)};
  return {true, {}};
}

namespace {

void scan_runs(const BinaryMatrix& topology, Axis axis, std::set<std::pair<int, int>>& width_seen,
               std::set<std::pair<int, int>>& space_seen, ConstraintSet& out) {
  const bool along_x = axis == Axis::x;
  const int lines = static_cast<int>(along_x ? topology.rows() : topology.cols());
  const int length = static_cast<int>(along_x ? topology.cols() : topology.rows());
  auto at = [&](int line, int i) { return along_x ? topology(line, i) : topology(i, line); };
  for (int line = 0; line < lines; ++line) {
    int prev_shape_end = -1;
    for (int i = 0; i < length;) {
      const int value = at(line, i);
      int j = i;
      while (j + 1 < length && at(line, j + 1) == value) ++j;
      if (value == 1) {
        if (width_seen.insert({i, j}).second) out.width_runs.push_back({axis, line, i, j});
        if (prev_shape_end >= 0 && prev_shape_end + 1 <= i - 1 &&
            space_seen.insert({prev_shape_end + 1, i - 1}).second)
          out.space_runs.push_back({axis, line, prev_shape_end + 1, i - 1});
        prev_shape_end = j;
      }
      i = j + 1;
    }
  }
}

}  // namespace

ConstraintSet extract_constraints(const BinaryMatrix& topology) {
  if ((topology.array() > 1).any()) throw ValidationError("topology entries must be 0 or 1");
  ConstraintSet out;
  out.rows = static_cast<int>(topology.rows());
  out.cols = static_cast<int>(topology.cols());
  for (Axis axis : {Axis::x, Axis::y}) {
    std::set<std::pair<int, int>> width_seen, space_seen;
    scan_runs(topology, axis, width_seen, space_seen, out);
  }
  const ComponentLabels labels = label_components(topology);
  out.polygons.resize(labels.count);
  for (Index r = 0; r < topology.rows(); ++r)
    for (Index c = 0; c < topology.cols(); ++c)
      if (labels.label(r, c) >= 0)
        out.polygons[labels.label(r, c)].push_back({static_cast<int>(r), static_cast<int>(c)});
  return out;
}

ConstraintSet extract_constraints(const BinaryMatrix& topology, const RuleSet& rules) {
  validate(rules);
  return extract_constraints(topology);
}

namespace {

struct Bound {
  int a, b;
  double lower;
};

// One axis of the linear subsystem: x >= floor, sum(x) = total, range sums >= bound.
struct AxisSystem {
  int n = 0;
  double total = 0;
  double floor = 1.0;
  std::vector<Bound> bounds;

  double violation(const VectorXd& x) const {
    double worst = std::abs(x.sum() - total);
    worst = std::max(worst, floor - x.minCoeff());
    for (const auto& bd : bounds) worst = std::max(worst, bd.lower - x.segment(bd.a, bd.b - bd.a + 1).sum());
    return worst;
  }

  // Smallest-sum feasible vector for the lower bounds alone; covering the
  // ranges in order of right end point and topping up the right-most entry
  // is optimal for interval constraints.
  VectorXd minimal() const {
    VectorXd x = VectorXd::Constant(n, floor);
    std::vector<Bound> sorted = bounds;
    std::sort(sorted.begin(), sorted.end(), [](const Bound& l, const Bound& r) { return l.b < r.b; });
    for (const auto& bd : sorted) {
      const double s = x.segment(bd.a, bd.b - bd.a + 1).sum();
      if (s < bd.lower) x(bd.b) += bd.lower - s;
    }
    return x;
  }

  // Dykstra's alternating projection onto box, half-spaces and the sum plane.
  VectorXd project(const VectorXd& start, double tol, int& sweeps_used) const {
    const int sets = static_cast<int>(bounds.size()) + 2;
    std::vector<VectorXd> inc(sets, VectorXd::Zero(n));
    VectorXd x = start;
    const int max_sweeps = 20'000;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (int s = 0; s < sets; ++s) {
        const VectorXd y = x + inc[s];
        VectorXd p = y;
        if (s == 0) {
          p = p.cwiseMax(floor);
        } else if (s < sets - 1) {
          const Bound& bd = bounds[s - 1];
          const int len = bd.b - bd.a + 1;
          const double sum = p.segment(bd.a, len).sum();
          if (sum < bd.lower) p.segment(bd.a, len).array() += (bd.lower - sum) / len;
        } else {
          p.array() += (total - p.sum()) / n;
        }
        inc[s] = y - p;
        x = std::move(p);
      }
      if (violation(x) <= tol) {
        sweeps_used = sweep + 1;
        return x;
      }
    }
    sweeps_used = max_sweeps;
    return x;
  }
};

AxisSystem axis_system(const ConstraintSet& cs, const RuleSet& rules, Axis axis, double margin) {
  AxisSystem sys;
  sys.n = axis == Axis::x ? cs.cols : cs.rows;
  sys.total = static_cast<double>(rules.window);
  sys.floor = 1.0 + margin;
  auto add = [&](const std::vector<Run>& runs, Coord limit) {
    for (const auto& r : runs)
      if (r.axis == axis)
        sys.bounds.push_back({r.a, r.b, static_cast<double>(limit) + margin * (r.b - r.a + 2)});
  };
  add(cs.width_runs, rules.width_min);
  add(cs.space_runs, rules.space_min);
  return sys;
}

struct PolygonBox {
  int row_lo, row_hi, col_lo, col_hi;
};

double polygon_area(const std::vector<Cell>& cells, const VectorXd& x, const VectorXd& y) {
  double a = 0;
  for (const auto& c : cells) a += x(c.col) * y(c.row);
  return a;
}

std::vector<Coord> round_to_window(const VectorXd& v, Coord window) {
  std::vector<Coord> out(v.size());
  Coord sum = 0;
  for (Index i = 0; i < v.size(); ++i) {
    out[i] = std::llround(v(i));
    sum += out[i];
  }
  const auto largest = std::max_element(out.begin(), out.end());
  *largest += window - sum;
  return out;
}

VectorXd initial_deltas(int n, double window, Philox& rng) {
  // Symmetric Dirichlet(1) scaled to the window.
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = -std::log(1.0 - rng.uniform());
  return g * (window / g.sum());
}

Solution solve_impl(const BinaryMatrix& topology, const RuleSet& rules, const ConstraintSet& cs,
                    const Initializer& init, Philox& rng, const SolverOptions& options) {
  validate(rules);
  if (cs.rows != topology.rows() || cs.cols != topology.cols())
    throw ShapeError("constraint set was extracted from a different topology shape");
  Solution sol;
  VectorXd x0, y0;
  if (init.kind == Initializer::Kind::library) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < init.library.size(); ++i)
      if (init.library[i].first.size() == static_cast<std::size_t>(cs.cols) &&
          init.library[i].second.size() == static_cast<std::size_t>(cs.rows))
        usable.push_back(i);
    if (usable.empty())
      throw ConfigurationError("delta library has no entry matching a " + std::to_string(cs.rows) +
                               "x" + std::to_string(cs.cols) + " topology");
    const auto& pick = init.library[usable[rng.below(usable.size())]];
    x0 = Eigen::Map<const Eigen::Matrix<Coord, Eigen::Dynamic, 1>>(pick.first.data(), cs.cols).cast<double>();
    y0 = Eigen::Map<const Eigen::Matrix<Coord, Eigen::Dynamic, 1>>(pick.second.data(), cs.rows).cast<double>();
    // Library patterns may come from a different window size.
    x0 *= static_cast<double>(rules.window) / x0.sum();
    y0 *= static_cast<double>(rules.window) / y0.sum();
    sol.initializer = "library";
  } else {
    x0 = initial_deltas(cs.cols, static_cast<double>(rules.window), rng);
    y0 = initial_deltas(cs.rows, static_cast<double>(rules.window), rng);
    sol.initializer = "random";
  }

  std::vector<PolygonBox> boxes;
  for (const auto& poly : cs.polygons) {
    PolygonBox b{std::numeric_limits<int>::max(), -1, std::numeric_limits<int>::max(), -1};
    for (const auto& c : poly) {
      b.row_lo = std::min(b.row_lo, c.row);
      b.row_hi = std::max(b.row_hi, c.row);
      b.col_lo = std::min(b.col_lo, c.col);
      b.col_hi = std::max(b.col_hi, c.col);
    }
    boxes.push_back(b);
  }

  const double tol = options.tolerance * 1e-2;
  int budget = options.max_iterations;
  for (double margin : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const AxisSystem sx = axis_system(cs, rules, Axis::x, margin);
    const AxisSystem sy = axis_system(cs, rules, Axis::y, margin);
    if (sx.minimal().sum() > sx.total + tol || sy.minimal().sum() > sy.total + tol) {
      if (margin == 0.0) {
        sol.reason = "width/space lower bounds exceed the window";
        return sol;
      }
      break;
    }
    const double area_margin = margin * 2.0 * static_cast<double>(rules.window);
    const double area_lo = static_cast<double>(rules.area_min) + area_margin;
    const double area_hi = static_cast<double>(rules.area_max) - area_margin;
    if (area_lo > area_hi) break;

    int sweeps = 0;
    VectorXd x = sx.project(x0, tol, sweeps);
    VectorXd y = sy.project(y0, tol, sweeps);
    bool areas_ok = false;
    while (budget > 0) {
      --budget;
      ++sol.iterations;
      areas_ok = true;
      for (std::size_t p = 0; p < cs.polygons.size(); ++p) {
        const double area = polygon_area(cs.polygons[p], x, y);
        if (area >= area_lo && area <= area_hi) continue;
        areas_ok = false;
        const double target = area < area_lo ? area_lo * (1.0 + 1e-3) : area_hi * (1.0 - 1e-3);
        const double s = std::sqrt(target / area);
        const PolygonBox& b = boxes[p];
        x.segment(b.col_lo, b.col_hi - b.col_lo + 1) *= s;
        y.segment(b.row_lo, b.row_hi - b.row_lo + 1) *= s;
      }
      if (areas_ok) break;
      x = sx.project(x, tol, sweeps);
      y = sy.project(y, tol, sweeps);
    }
    if (!areas_ok) {
      sol.reason = "iteration cap reached";
      return sol;
    }
    sol.residual = std::max(sx.violation(x), sy.violation(y));
    if (sol.residual > options.tolerance) continue;

    std::vector<Coord> dx = round_to_window(x, rules.window);
    std::vector<Coord> dy = round_to_window(y, rules.window);
    if (satisfies(topology, rules, cs, dx, dy)) {
      sol.status = Solution::Status::solved;
      sol.delta_x = std::move(dx);
      sol.delta_y = std::move(dy);
      sol.real_x = std::move(x);
      sol.real_y = std::move(y);
      sol.reason.clear();
      return sol;
    }
    x0 = x;
    y0 = y;
  }
  sol.reason = "no integer solution survived rounding";
  return sol;
}

}  // namespace

bool satisfies(const BinaryMatrix& topology, const RuleSet& rules, const ConstraintSet& cs,
               const std::vector<Coord>& dx, const std::vector<Coord>& dy) {
  if (static_cast<Index>(dx.size()) != topology.cols() || static_cast<Index>(dy.size()) != topology.rows())
    return false;
  Coord sx = 0, sy = 0;
  for (Coord d : dx) {
    if (d <= 0) return false;
    sx += d;
  }
  for (Coord d : dy) {
    if (d <= 0) return false;
    sy += d;
  }
  if (sx != rules.window || sy != rules.window) return false;
  auto range = [&](const Run& r) {
    const auto& v = r.axis == Axis::x ? dx : dy;
    Coord s = 0;
    for (int i = r.a; i <= r.b; ++i) s += v[i];
    return s;
  };
  for (const auto& r : cs.width_runs)
    if (range(r) < rules.width_min) return false;
  for (const auto& r : cs.space_runs)
    if (range(r) < rules.space_min) return false;
  for (const auto& poly : cs.polygons) {
    Coord area = 0;
    for (const auto& c : poly) area += dx[c.col] * dy[c.row];
    if (area < rules.area_min || area > rules.area_max) return false;
  }
  return true;
}

Solution solve(const BinaryMatrix& topology, const RuleSet& rules, const ConstraintSet& constraints,
               const Initializer& initializer, std::uint64_t seed, const SolverOptions& options) {
  Philox rng(seed);
  return solve_impl(topology, rules, constraints, initializer, rng, options);
}

SolveManyResult solve_many(const BinaryMatrix& topology, const RuleSet& rules, int n,
                           std::uint64_t seed, const Initializer& initializer,
                           const SolverOptions& options) {
  if (n < 1) throw ParameterError("solve_many needs n >= 1");
  const ConstraintSet cs = extract_constraints(topology, rules);
  SolveManyResult out;
  std::set<std::pair<std::vector<Coord>, std::vector<Coord>>> seen;
  const long attempts = 20L * n + 20;
  for (long attempt = 0; attempt < attempts && static_cast<int>(out.solutions.size()) < n; ++attempt) {
    Philox rng = Philox::derive(seed, static_cast<std::uint64_t>(attempt));
    Solution s = solve_impl(topology, rules, cs, initializer, rng, options);
    if (!s.solved()) {
      if (attempt == 0 && s.reason == "width/space lower bounds exceed the window") break;
      continue;
    }
    if (seen.insert({s.delta_x, s.delta_y}).second) out.solutions.push_back(std::move(s));
  }
  // Every delta is pinned when each axis has no slack above its lower bounds.
  const double slack_x = axis_system(cs, rules, Axis::x, 0.0).minimal().sum();
  const double slack_y = axis_system(cs, rules, Axis::y, 0.0).minimal().sum();
  const double window = static_cast<double>(rules.window);
  const bool pinned_x = cs.cols == 1 || std::abs(slack_x - window) < 1e-9;
  const bool pinned_y = cs.rows == 1 || std::abs(slack_y - window) < 1e-9;
  out.fully_determined = pinned_x && pinned_y && out.solutions.size() <= 1;
  out.partial = static_cast<int>(out.solutions.size()) < n;
  return out;
}

}  // namespace squishdiff
