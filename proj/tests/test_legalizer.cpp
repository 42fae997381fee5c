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
#include "squishdiff/legalizer.hpp"
#include "squishdiff/squish.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace squishdiff;
using testing::matrix;

namespace {

bool has_run(const std::vector<Run>& runs, Axis axis, int a, int b) {
  return std::any_of(runs.begin(), runs.end(), [&](const Run& r) { return r.axis == axis && r.a == a && r.b == b; });
}

LayoutPattern layout_of(const BinaryMatrix& t, const Solution& s) {
  return reconstruct_layout({t, s.delta_x, s.delta_y});
}

}  // namespace

TEST_CASE("prefilter") {
  const auto bow = prefilter(matrix({{1, 0}, {0, 1}}));
  CHECK_FALSE(bow.accepted);
  CHECK(bow.reason.find("bow-tie") != std::string::npos);
  CHECK_FALSE(prefilter(matrix({{0, 1}, {1, 0}})));
  CHECK(prefilter(BinaryMatrix::Zero(5, 5)));
  CHECK(prefilter(BinaryMatrix::Ones(5, 5)));
  CHECK(prefilter(matrix({{1, 1}, {0, 1}})));
  CHECK_FALSE(prefilter(matrix({{1, 1, 1}, {1, 0, 1}, {1, 1, 1}})));
  CHECK(prefilter(matrix({{1, 1, 1}, {1, 0, 1}, {1, 0, 1}})));
}

TEST_CASE("extract constraints") {
  const auto cs = extract_constraints(matrix({{1, 1, 0, 1}}));
  CHECK(has_run(cs.width_runs, Axis::x, 0, 1));
  CHECK(has_run(cs.width_runs, Axis::x, 3, 3));
  CHECK(has_run(cs.space_runs, Axis::x, 2, 2));
  CHECK(std::count_if(cs.space_runs.begin(), cs.space_runs.end(), [](const Run& r) { return r.axis == Axis::x; }) == 1);

  const auto empty = extract_constraints(BinaryMatrix::Zero(3, 3));
  CHECK(empty.width_runs.empty());
  CHECK(empty.space_runs.empty());
  CHECK(empty.polygons.empty());

  const auto two = extract_constraints(matrix({{1, 0, 1}}));
  CHECK(two.width_runs.size() == 3);
  CHECK(has_run(two.width_runs, Axis::x, 0, 0));
  CHECK(has_run(two.width_runs, Axis::x, 2, 2));
  CHECK(has_run(two.width_runs, Axis::y, 0, 0));
  CHECK(two.space_runs.size() == 1);
  CHECK(has_run(two.space_runs, Axis::x, 1, 1));
  CHECK(two.polygons.size() == 2);
}

TEST_CASE("space runs need shapes on both sides") {
  const auto cs = extract_constraints(matrix({{0, 1, 0, 0, 1, 0}}));
  CHECK(cs.space_runs.size() == 1);
  CHECK(has_run(cs.space_runs, Axis::x, 2, 3));
}

TEST_CASE("solve examples") {
  const RuleSet rules;
  const auto one = matrix({{1}});
  const auto s1 = solve(one, rules, extract_constraints(one, rules), Initializer::random(), 1);
  REQUIRE(s1.solved());
  CHECK(s1.delta_x == std::vector<Coord>{2048});
  CHECK(s1.delta_y == std::vector<Coord>{2048});

  const auto t = matrix({{1, 0, 1}});
  const auto cs = extract_constraints(t, rules);
  CHECK(satisfies(t, rules, cs, {674, 700, 674}, {2048}));
  CHECK_FALSE(satisfies(t, rules, cs, {1000, 50, 998}, {2048}));
  CHECK_FALSE(satisfies(t, rules, cs, {674, 700, 675}, {2048}));
  const auto s = solve(t, rules, cs, Initializer::random(), 2);
  REQUIRE(s.solved());
  CHECK(satisfies(t, rules, cs, s.delta_x, s.delta_y));
  CHECK(check_drc(layout_of(t, s), rules).empty());

  RuleSet tight = rules;
  tight.window = 250;
  tight.area_max = 250 * 250;
  const auto bad = solve(t, tight, extract_constraints(t, tight), Initializer::random(), 3);
  CHECK_FALSE(bad.solved());
  CHECK_FALSE(bad.reason.empty());
}

TEST_CASE("area bounds are enforced") {
  RuleSet rules;
  rules.area_min = 400'000;
  rules.area_max = 600'000;
  const auto t = matrix({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  const auto cs = extract_constraints(t, rules);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = solve(t, rules, cs, Initializer::random(), seed);
    REQUIRE(s.solved());
    const Coord area = s.delta_x[1] * s.delta_y[1];
    CHECK(area >= rules.area_min);
    CHECK(area <= rules.area_max);
  }
}

TEST_CASE("solve is deterministic") {
  const RuleSet rules;
  Philox rng(4);
  const auto t = testing::random_topology(rng, 8);
  const auto cs = extract_constraints(t, rules);
  const auto a = solve(t, rules, cs, Initializer::random(), 99);
  const auto b = solve(t, rules, cs, Initializer::random(), 99);
  CHECK(a.delta_x == b.delta_x);
  CHECK(a.delta_y == b.delta_y);
}

TEST_CASE("library initializer") {
  const RuleSet rules;
  const auto t = matrix({{1, 0, 1}});
  const auto cs = extract_constraints(t, rules);
  const auto init = Initializer::from_library({{{600, 800, 648}, {2048}}, {{1, 2}, {3}}});
  const auto s = solve(t, rules, cs, init, 5);
  REQUIRE(s.solved());
  CHECK(s.initializer == "library");
  CHECK(satisfies(t, rules, cs, s.delta_x, s.delta_y));
}

TEST_CASE("solve many") {
  const RuleSet rules;
  const auto one = solve_many(matrix({{1}}), rules, 10, 1);
  CHECK(one.fully_determined);
  CHECK(one.solutions.size() == 1);

  const auto t = matrix({{1, 0, 1}});
  const auto many = solve_many(t, rules, 100, 2);
  CHECK_FALSE(many.partial);
  REQUIRE(many.solutions.size() == 100);
  std::set<std::pair<std::vector<Coord>, std::vector<Coord>>> distinct;
  for (const auto& s : many.solutions) {
    distinct.insert({s.delta_x, s.delta_y});
    CHECK(check_drc(layout_of(t, s), rules).empty());
  }
  CHECK(distinct.size() == 100);

  const auto single = solve_many(t, rules, 1, 2);
  REQUIRE(single.solutions.size() == 1);
  CHECK(satisfies(t, rules, extract_constraints(t, rules), single.solutions[0].delta_x, single.solutions[0].delta_y));
}

TEST_CASE("transposed topology swaps the axes") {
  const RuleSet rules;
  Philox rng(8);
  for (int i = 0; i < 20; ++i) {
    const BinaryMatrix t = testing::random_topology(rng, 6);
    const BinaryMatrix tt = t.transpose();
    const auto s = solve(t, rules, extract_constraints(t, rules), Initializer::random(), i);
    REQUIRE(s.solved());
    CHECK(satisfies(tt, rules, extract_constraints(tt, rules), s.delta_y, s.delta_x));
  }
}

TEST_CASE("random accepted topologies legalize cleanly") {
  const RuleSet rules;
  Philox rng(10);
  int solved = 0;
  for (int i = 0; i < 60; ++i) {
    const auto t = testing::random_topology(rng, 4 + static_cast<int>(rng.below(12)));
    REQUIRE(prefilter(t));
    const auto s = solve(t, rules, extract_constraints(t, rules), Initializer::random(), i);
    if (!s.solved()) continue;
    ++solved;
    const auto l = layout_of(t, s);
    CHECK(std::accumulate(s.delta_x.begin(), s.delta_x.end(), Coord{0}) == 2048);
    CHECK(check_drc(l, rules).empty());
  }
  CHECK(solved >= 55);
}
