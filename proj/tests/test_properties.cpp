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

#include "squishdiff/denoiser.hpp"
#include "squishdiff/drc.hpp"
#include "squishdiff/legalizer.hpp"
#include "squishdiff/metrics.hpp"
#include "squishdiff/squish.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

using namespace squishdiff;

TEST_CASE("transition products are doubly stochastic") {
  Philox rng(40);
  std::vector<double> betas(200);
  for (double& b : betas) b = 0.001 + 0.998 * rng.uniform();
  const Schedule s(betas);
  for (int k = 0; k <= 200; ++k) {
    CHECK((s.cumulative(k).rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-12);
    CHECK((s.cumulative(k).colwise().sum().array() - 1).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("forward sample chi-square") {
  const auto s = make_schedule(30, 0.01, 0.5);
  TopologyTensor x(1, 1);
  for (int x0 : {0, 1})
    for (int k : {1, 5, 17, 30}) {
      x.data(0, 0) = static_cast<std::uint8_t>(x0);
      Philox rng = Philox::derive(41, static_cast<std::uint64_t>(k * 2 + x0));
      const int n = 100000;
      double ones = 0;
      for (int i = 0; i < n; ++i) ones += forward_sample(x, s, k, rng).data(0, 0);
      const auto p = forward_marginal(x0, s, k);
      const double e0 = n * p(0), e1 = n * p(1);
      const double chi2 = (n - ones - e0) * (n - ones - e0) / e0 + (ones - e1) * (ones - e1) / e1;
      CHECK(chi2 < 10.828);  // one degree of freedom, significance 0.001
    }
}

TEST_CASE("loss vanishes only at the point mass") {
  const auto s = make_schedule(10, 0.05, 0.5);
  for (int k = 2; k <= 10; ++k)
    for (int x0 : {0, 1})
      for (int xk : {0, 1}) {
        Row2<double> point = Row2<double>::Zero();
        point(x0) = 1.0;
        CHECK(std::abs(entry_loss(x0, xk, point, s, k, 0.001)) <= 1e-15);
        for (double q : {0.01, 0.3, 0.7}) {
          Row2<double> other = point * (1 - q);
          other(1 - x0) = q;
          CHECK(entry_loss(x0, xk, other, s, k, 0.001) > 0);
        }
      }
}

TEST_CASE("conv predictions are probabilities for large parameters") {
  ConvDenoiser d({4, 3, 8, 2, 16}, 42);
  Philox rng(42);
  for (Eigen::Index i = 0; i < d.parameters().size(); ++i) d.parameters()(i) = 20.0 * (rng.uniform() - 0.5);
  TopologyTensor x(4, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data(i) = static_cast<std::uint8_t>(rng.below(2));
  for (int k : {1, 50, 1000}) {
    const auto p = d.predict(x, k);
    CHECK(p.allFinite());
    CHECK((p.array() >= 0).all());
    CHECK((p.array() <= 1).all());
  }
}

TEST_CASE("constraints swap axes under transposition") {
  Philox rng(43);
  auto key = [](const Run& r, bool swap) {
    const Axis a = swap ? (r.axis == Axis::x ? Axis::y : Axis::x) : r.axis;
    return std::make_tuple(a == Axis::x, r.a, r.b);
  };
  for (int i = 0; i < 30; ++i) {
    BinaryMatrix t(5 + i % 4, 3 + i % 5);
    for (Eigen::Index e = 0; e < t.size(); ++e) t(e) = static_cast<std::uint8_t>(rng.below(2));
    const BinaryMatrix tt = t.transpose();
    const auto a = extract_constraints(t), b = extract_constraints(tt);
    std::set<std::tuple<bool, int, int>> wa, wb, sa, sb;
    for (const auto& r : a.width_runs) wa.insert(key(r, true));
    for (const auto& r : b.width_runs) wb.insert(key(r, false));
    for (const auto& r : a.space_runs) sa.insert(key(r, true));
    for (const auto& r : b.space_runs) sb.insert(key(r, false));
    CHECK(wa == wb);
    CHECK(sa == sb);
    CHECK(a.polygons.size() == b.polygons.size());
  }
}

TEST_CASE("empty topology needs only the sum") {
  const RuleSet rules;
  const BinaryMatrix t = BinaryMatrix::Zero(4, 3);
  const auto s = solve(t, rules, extract_constraints(t, rules), Initializer::random(), 1);
  REQUIRE(s.solved());
  CHECK(std::accumulate(s.delta_x.begin(), s.delta_x.end(), Coord{0}) == rules.window);
  CHECK(std::accumulate(s.delta_y.begin(), s.delta_y.end(), Coord{0}) == rules.window);
  for (Coord d : s.delta_x) CHECK(d >= 1);
}

TEST_CASE("entropy bounds") {
  Philox rng(44);
  for (int i = 0; i < 50; ++i) {
    std::vector<Complexity> cs;
    const int n = 1 + static_cast<int>(rng.below(60));
    for (int j = 0; j < n; ++j) cs.push_back({static_cast<int>(rng.below(5)), static_cast<int>(rng.below(3))});
    const auto r = diversity_of(cs);
    CHECK(r.entropy_bits >= 0);
    CHECK(r.entropy_bits <= std::log2(double(r.counts.size())) + 1e-12);
  }
}

TEST_CASE("drc is symmetric and invariant") {
  const RuleSet rules;
  Philox rng(45);
  for (int i = 0; i < 40; ++i) {
    const auto l = testing::random_layout(rng, 12);
    const auto v = check_drc(l, rules);
    LayoutPattern rev = l;
    std::reverse(rev.polygons.begin(), rev.polygons.end());
    const auto w = check_drc(rev, rules);
    CHECK(v.size() == w.size());
    std::multiset<std::tuple<int, char, double>> a, b;
    for (const auto& x : v) a.insert({int(x.kind), x.axis, x.measured});
    for (const auto& x : w) b.insert({int(x.kind), x.axis, x.measured});
    CHECK(a == b);

    LayoutPattern tr{l.height, l.width, {}};
    for (const auto& p : l.polygons) {
      Polygon q;
      for (auto it = p.rbegin(); it != p.rend(); ++it) q.push_back({it->y, it->x});
      tr.polygons.push_back(q);
    }
    std::multiset<std::tuple<int, char, double>> c;
    for (const auto& x : check_drc(tr, rules))
      c.insert({int(x.kind), x.axis == 'x' ? 'y' : x.axis == 'y' ? 'x' : x.axis, x.measured});
    CHECK(a == c);
  }
}
