// Copyright 2026 The sbmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sbm/rng.hpp"
#include "sbm/stats.hpp"

using namespace sbm;

TEST_CASE("Philox4x32-10 known answers") {
  // Random123 reference vectors.
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
  auto c = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c[0] == 0xd16cfe09u);
  CHECK(c[1] == 0x94fdccebu);
  CHECK(c[2] == 0x5001e420u);
  CHECK(c[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and children are distinct") {
  Stream a(7, 3), b(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> firsts;
  const Stream parent(7, 3);
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(parent.child(i).next_u64());
  CHECK(firsts.size() == 1000);
  CHECK(parent.child(5).next_u64() == parent.child(5).next_u64());
  CHECK(Stream(7, 3).next_u64() != Stream(8, 3).next_u64());
}

TEST_CASE("uniform and normal moments") {
  Stream s(1, 1);
  RunningStats u, n, n2;
  for (int i = 0; i < 200000; ++i) {
    const double x = s.uniform();
    CHECK_MESSAGE((x > 0.0 && x < 1.0), x);
    u.add(x);
    const double z = s.normal();
    n.add(z);
    n2.add(z * z);
  }
  CHECK(std::fabs(u.mean() - 0.5) < 4 * std::sqrt(1.0 / 12 / 200000));
  CHECK(std::fabs(n.mean()) < 4 * std::sqrt(1.0 / 200000));
  CHECK(std::fabs(n2.mean() - 1.0) < 4 * std::sqrt(2.0 / 200000));
}

TEST_CASE("Poisson sampler matches Poisson law") {
  for (double mean : {0.3, 2.5, 9.9, 10.0, 47.0, 800.0}) {
    Stream s(11, static_cast<std::uint64_t>(mean * 10));
    std::vector<std::uint64_t> xs(20000);
    for (auto& x : xs) x = s.poisson(mean);
    const auto chi = chi_square_poisson(xs, mean);
    CHECK_MESSAGE(chi.p_value > 1e-4, "mean " << mean << " p " << chi.p_value);
  }
}

TEST_CASE("geometric and binomial means") {
  Stream s(5, 5);
  for (double p : {0.9, 0.3, 0.01, 1e-4}) {
    RunningStats g;
    for (int i = 0; i < 20000; ++i) {
      const auto k = s.geometric(p);
      CHECK(k >= 1);
      g.add(static_cast<double>(k));
    }
    const double sd = std::sqrt((1 - p) / (p * p) / 20000);
    CHECK(std::fabs(g.mean() - 1 / p) < 4 * sd);
  }
  for (auto [n, p] : {std::pair<std::uint64_t, double>{10, 0.5}, {1000, 0.001}, {100000, 0.3}, {5, 0.0}, {5, 1.0}}) {
    RunningStats b;
    for (int i = 0; i < 20000; ++i) {
      const auto k = s.binomial(n, p);
      CHECK(k <= n);
      b.add(static_cast<double>(k));
    }
    const double sd = std::sqrt(n * p * (1 - p) / 20000);
    CHECK(std::fabs(b.mean() - n * p) <= 4 * sd + 1e-12);
  }
}

TEST_CASE("below is unbiased") {
  Stream s(3, 3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[s.below(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 4 * std::sqrt(10000.0));
}
