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
#include "squishdiff/errors.hpp"
#include "squishdiff/metrics.hpp"
#include "squishdiff/squish.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace squishdiff;

namespace {

Polygon rect(Coord x0, Coord y0, Coord x1, Coord y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

LayoutPattern transpose(const LayoutPattern& l) {
  LayoutPattern out{l.height, l.width, {}};
  for (const auto& p : l.polygons) {
    Polygon q;
    for (auto it = p.rbegin(); it != p.rend(); ++it) q.push_back({it->y, it->x});
    out.polygons.push_back(q);
  }
  return out;
}

LayoutPattern translate(const LayoutPattern& l, Coord dx, Coord dy) {
  LayoutPattern out = l;
  out.width += dx;
  out.height += dy;
  for (auto& p : out.polygons)
    for (auto& v : p) {
      v.x += dx;
      v.y += dy;
    }
  return out;
}

}  // namespace

TEST_CASE("space violation") {
  const RuleSet rules;
  const LayoutPattern l{2048, 2048, {rect(100, 100, 400, 400), rect(480, 100, 800, 400)}};
  const auto v = check_drc(l, rules);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::space);
  CHECK(v[0].axis == 'x');
  CHECK(v[0].measured == 80);
  CHECK(v[0].polygons == std::vector<int>{0, 1});

  const auto t = check_drc(transpose(l), rules);
  REQUIRE(t.size() == 1);
  CHECK(t[0].axis == 'y');
  CHECK(t[0].measured == 80);
  const auto s = check_drc(translate(l, 37, 91), rules);
  REQUIRE(s.size() == 1);
  CHECK(s[0].measured == 80);
}

TEST_CASE("gaps without overlapping projections are not spacing") {
  const RuleSet rules;
  const LayoutPattern diagonal{2048, 2048, {rect(100, 100, 400, 400), rect(450, 450, 800, 800)}};
  CHECK(check_drc(diagonal, rules).empty());
}

TEST_CASE("width violation") {
  const RuleSet rules;
  const LayoutPattern l{2048, 2048, {rect(100, 100, 190, 900)}};
  const auto v = check_drc(l, rules);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::width);
  CHECK(v[0].axis == 'x');
  CHECK(v[0].measured == 90);
  CHECK(check_drc(transpose(l), rules).size() == 1);
}

TEST_CASE("notch in an L shape") {
  const RuleSet rules;
  // Thin arm: 60 nm tall horizontal leg.
  const LayoutPattern l{2048, 2048, {{{0, 0}, {600, 0}, {600, 60}, {200, 60}, {200, 600}, {0, 600}}}};
  const auto v = check_drc(l, rules);
  REQUIRE(v.size() == 1);
  CHECK(v[0].axis == 'y');
  CHECK(v[0].measured == 60);
}

TEST_CASE("area bounds") {
  RuleSet rules;
  rules.area_max = 500'000;
  const LayoutPattern small{2048, 2048, {rect(0, 0, 100, 99 + 1)}};
  CHECK(check_drc(small, rules).empty());
  const LayoutPattern tiny{2048, 2048, {rect(0, 0, 100, 100), rect(300, 0, 1300, 1000)}};
  const auto v = check_drc(tiny, rules);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::area);
  CHECK(v[0].measured == 1e6);
  CHECK(v[0].polygons == std::vector<int>{1});
}

TEST_CASE("violations json") {
  const RuleSet rules;
  const LayoutPattern l{2048, 2048, {rect(100, 100, 400, 400), rect(480, 100, 800, 400)}};
  const auto j = nlohmann::json::parse(violations_to_json(check_drc(l, rules)));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["kind"] == "space");
  CHECK(j[0]["axis"] == "x");
  CHECK(j[0]["measured"] == 80.0);
}

TEST_CASE("entropy") {
  const std::vector<Complexity> same{{2, 3}, {2, 3}, {2, 3}};
  CHECK(diversity_of(same).entropy_bits == 0.0);
  const std::vector<Complexity> four{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  CHECK(diversity_of(four).entropy_bits == doctest::Approx(2.0).epsilon(1e-15));
  const std::vector<Complexity> mixed{{1, 1}, {1, 1}, {2, 2}, {3, 3}};
  const auto r = diversity_of(mixed);
  CHECK(r.entropy_bits == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r.histogram.at({1, 1}) == 0.5);
  CHECK(r.counts.at({3, 3}) == 1);
  CHECK(r.pattern_count == 4);
  CHECK_THROWS_AS(diversity_of(std::vector<Complexity>{}), ParameterError);
  const std::vector<double> w{1, 1, 2, 0};
  CHECK(entropy_bits(w) == doctest::Approx(1.5));

  const auto j = nlohmann::json::parse(diversity_to_json(r));
  CHECK(j["entropy_bits"].get<double>() == doctest::Approx(1.5));
  CHECK(histogram_to_csv(r).rfind("c_x,c_y,count,probability\n", 0) == 0);
}

TEST_CASE("diversity of squish patterns") {
  std::vector<SquishPattern> ps;
  ps.push_back(extract_squish({2048, 2048, {rect(500, 600, 800, 1000)}}));
  ps.push_back(extract_squish({2048, 2048, {}}));
  CHECK(diversity(ps).entropy_bits == doctest::Approx(1.0));
  CHECK(diversity(ps).counts.at({3, 3}) == 1);
}

TEST_CASE("legality rate") {
  const RuleSet rules;
  std::vector<LayoutPattern> lib(9, LayoutPattern{2048, 2048, {rect(100, 100, 400, 400)}});
  lib.push_back({2048, 2048, {rect(100, 100, 400, 400), rect(480, 100, 800, 400)}});
  CHECK(legality_rate(lib, rules) == doctest::Approx(0.9));
  RuleSet strict = rules;
  strict.area_min = 1'000'000;
  const std::vector<LayoutPattern> empty{{2048, 2048, {}}};
  CHECK(legality_rate(empty, strict) == 1.0);
}
