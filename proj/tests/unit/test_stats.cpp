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
#include <vector>

#include "doctest.h"
#include "sbm/rng.hpp"
#include "sbm/stats.hpp"

using namespace sbm;

TEST_CASE("normal quantile") {
  CHECK(z_for_confidence(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(z_for_confidence(0.99) == doctest::Approx(2.575829).epsilon(1e-6));
}

TEST_CASE("Wilson interval") {
  const Interval zero = wilson_interval(0, 100, 0.95);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(0.0370).epsilon(1e-3));
  const Interval all = wilson_interval(100, 100, 0.95);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(1.0 - zero.hi).epsilon(1e-12));
  const Interval half = wilson_interval(50, 100, 0.95);
  CHECK(half.lo + half.hi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(half.lo < 0.5);
  CHECK(half.hi > 0.5);
  CHECK_THROWS(wilson_interval(0, 0, 0.95));
  CHECK_THROWS(wilson_interval(5, 4, 0.95));
}

TEST_CASE("Wilson coverage at n = 200") {
  // Exact coverage by summing the binomial law.
  const int n = 200;
  const double p = 0.37;
  double cover = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                          (n - k) * std::log1p(-p);
    const Interval I = wilson_interval(static_cast<std::uint64_t>(k), n, 0.95);
    if (I.lo <= p && p <= I.hi) cover += std::exp(logpmf);
  }
  CHECK(cover >= 0.94);
  CHECK(cover <= 0.96);
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(2e-2));
  CHECK(ks_pvalue(1000, ks_critical(1000, 0.05)) == doctest::Approx(0.05).epsilon(1e-6));
  const std::vector<double> zeros(50, 0.0);
  CHECK(ks_test_exponential(zeros, 1.0).statistic == doctest::Approx(1.0));
  const std::vector<double> with_inf = {0.1, INFINITY, 0.5};
  CHECK(ks_test_exponential(with_inf, 1.0).excluded == 1);
}

TEST_CASE("KS test rejects about alpha of the time under the null") {
  Stream s(7, 1);
  int rejected = 0;
  const int trials = 2000;
  for (int k = 0; k < trials; ++k) {
    Stream c = s.child(k);
    std::vector<double> x(200);
    for (double& v : x) v = c.exponential(2.0);
    if (ks_test_exponential(x, 2.0).p_value < 0.05) ++rejected;
  }
  const double rate = rejected / static_cast<double>(trials);
  CHECK(rate == doctest::Approx(0.05).epsilon(0.3));
}

TEST_CASE("chi-square Poisson fit") {
  Stream s(11, 2);
  std::vector<std::uint64_t> c(5000);
  for (auto& v : c) v = s.poisson(3.5);
  const auto good = chi_square_poisson(c, 3.5);
  CHECK(good.p_value > 1e-4);
  const auto bad = chi_square_poisson(c, 4.5);
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("RunningStats merge equals sequential accumulation") {
  RunningStats a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i) * 3.0 + i * 0.01;
    (i < 37 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(a.std_error() == doctest::Approx(std::sqrt(all.variance() / 100.0)).epsilon(1e-12));
}
