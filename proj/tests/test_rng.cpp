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

#include "squishdiff/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using squishdiff::Philox;

TEST_CASE("philox known answer") {
  // Philox4x32-10, key 0, counter 0.
  Philox g(0, 0);
  CHECK(g() == 0x6627e8d5e169c58dULL);
  CHECK(g() == 0xbc57ac4c9b00dbd8ULL);
}

TEST_CASE("philox streams are reproducible and distinct") {
  Philox a = Philox::derive(42, 7), b = Philox::derive(42, 7), c = Philox::derive(42, 8);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a();
    CHECK(va == b());
    seen.insert(va);
    seen.insert(c());
  }
  CHECK(seen.size() == 2000);
}

TEST_CASE("philox uniform and below") {
  Philox g(1);
  double sum = 0;
  int counts[3] = {0, 0, 0};
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    ++counts[g.below(3)];
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  for (int c : counts) CHECK(std::abs(c - n / 3) < 600);
}
