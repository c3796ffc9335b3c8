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
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "doctest.h"
#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"
#include "sbm/rng.hpp"

using namespace sbm;
using doctest::Approx;

TEST_CASE("heat kernel at the origin") {
  const std::vector<double> x1 = {0.0};
  const std::vector<double> x3 = {0.0, 0.0, 0.0};
  CHECK(heat_kernel(1.0, x1) == Approx(0.398942280401).epsilon(1e-12));
  CHECK(heat_kernel(1.0, x3) == Approx(0.0634936359342).epsilon(1e-12));
  CHECK_THROWS_AS(heat_kernel(0.0, x1), DomainError);
  CHECK_THROWS_AS(heat_kernel(-1.0, x1), DomainError);
}

TEST_CASE("heat kernel integrates to one") {
  using boost::math::quadrature::gauss_kronrod;
  for (int d = 1; d <= 4; ++d) {
    for (double t : {0.3, 2.0, 5.0}) {
      const double area = unit_sphere_area(d);
      const double I = gauss_kronrod<double, 61>::integrate(
          [&](double rho) { return area * std::pow(rho, d - 1) * heat_kernel_radial(t, rho, d); }, 0.0,
          std::numeric_limits<double>::infinity(), 15, 1e-12);
      CHECK(I == Approx(1.0).epsilon(1e-8));
    }
  }
  // Cartesian check in d=2 at t=2 without the radial reduction.
  const double one_dim = gauss_kronrod<double, 61>::integrate(
      [](double y) { return std::exp(-y * y / 4.0); }, -40.0, 40.0, 10, 1e-14);
  std::vector<double> p = {0.7, -1.1};
  const double at = heat_kernel(2.0, p);
  CHECK(at * 4.0 * std::numbers::pi == Approx(std::exp(-(0.49 + 1.21) / 4.0)).epsilon(1e-14));
  CHECK(one_dim * one_dim / (4.0 * std::numbers::pi) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("CSBP Laplace transform and extinction") {
  CHECK(csbp_laplace({1.0, 1.0, 1.0}) == Approx(0.606530659713).epsilon(1e-12));
  CHECK(csbp_laplace({0.0, 5.0, 1.0}) == 1.0);
  CHECK(csbp_laplace({INFINITY, 1.0, 1.0}) == 0.0);
  CHECK(csbp_laplace({1.0, 1.0, INFINITY}) == Approx(0.367879441171).epsilon(1e-12));
  CHECK(csbp_extinction(1.0, 1.0) == Approx(0.367879441171).epsilon(1e-12));
  CHECK(csbp_extinction(0.0, 1.0) == 1.0);
  CHECK(csbp_extinction(2.0, 4.0) == Approx(0.606530659713).epsilon(1e-12));
  CHECK_THROWS_AS(csbp_extinction(1.0, 0.0), DomainError);
}

TEST_CASE("Laplace transform increases to extinction monotonically in theta") {
  for (double m : {0.1, 1.0, 7.0}) {
    for (double t : {0.2, 1.0, 3.0}) {
      double prev = 1.0;
      for (double theta = 0.01; theta < 1e8; theta *= 1.7) {
        const double v = csbp_laplace({m, t, theta});
        CHECK(v <= prev);
        CHECK(v >= csbp_extinction(m, t));
        prev = v;
      }
      CHECK(prev == Approx(csbp_extinction(m, t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("extinction is multiplicative in the initial mass") {
  for (double m1 : {0.3, 1.0, 2.5})
    for (double m2 : {0.1, 4.0})
      for (double t : {0.5, 2.0})
        CHECK(csbp_extinction(m1 + m2, t) ==
              Approx(csbp_extinction(m1, t) * csbp_extinction(m2, t)).epsilon(1e-14));
}

TEST_CASE("extinction underflow clamps with a flag") {
  bool flag = false;
  CHECK(csbp_extinction(1000.0, 1.0, &flag) == 0.0);
  CHECK(flag);
  flag = false;
  CHECK(csbp_extinction(1.0, 1.0, &flag) > 0.0);
  CHECK_FALSE(flag);
}

TEST_CASE("Gaussian hitting bound") {
  CHECK(gaussian_hit_tail(1.0, 10.0) == Approx(4.0 / (std::sqrt(std::numbers::pi) * 10.0) * std::exp(-25.0)));
  CHECK(gaussian_hit_tail(1.0, 10.0) == Approx(3.14e-12).epsilon(0.01));
  CHECK(gaussian_hit_tail(1.0, 6.0) < 3.1e-4);
  CHECK(gaussian_hit_tail(1.0, 12.0) < 1e-14);
  double prev = 1.0;
  for (double g = 0.5; g < 30; g += 0.5) {
    const double v = gaussian_hit_tail(2.0, g);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(gaussian_hit_tail(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(gaussian_hit_tail(1.0, -1.0), DomainError);
}

TEST_CASE("Gaussian hitting bound dominates the first-passage probability") {
  // Reflection principle: P(max_{s<=t} W_s >= g) = erfc(g / sqrt(2t)).
  for (double g : {0.5, 1.0, 2.0, 6.0})
    CHECK(boost::math::erfc(g / std::sqrt(2.0)) <= gaussian_hit_tail(1.0, g));
  // Monte Carlo with the exact maximum of a Brownian bridge given the endpoint.
  Stream s(2026, 1);
  const int paths = 1'000'000;
  const double g = 2.0;
  int hits = 0;
  for (int i = 0; i < paths; ++i) {
    const double w = s.normal();
    const double m = 0.5 * (w + std::sqrt(w * w - 2.0 * std::log(s.uniform())));
    hits += m >= g;
  }
  const double p = static_cast<double>(hits) / paths;
  const double exact = boost::math::erfc(g / std::sqrt(2.0));
  CHECK(std::fabs(p - exact) < 4.0 * std::sqrt(exact / paths));
  CHECK(p < gaussian_hit_tail(1.0, g));
}

TEST_CASE("ball volumes and sphere areas") {
  CHECK(ball_volume(2, 1.0) == Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(ball_volume(3, 1.0) == Approx(4.18879020479).epsilon(1e-12));
  CHECK(ball_volume(1, 2.0) == Approx(4.0).epsilon(1e-15));
  CHECK(ball_volume(3, 0.0) == 0.0);
  for (int d = 1; d <= 12; ++d) {
    CHECK(gamma_half_plus_one(d) == Approx(std::tgamma(d / 2.0 + 1.0)).epsilon(1e-14));
    CHECK(unit_sphere_area(d) == Approx(d * ball_volume(d, 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("Paley-Zygmund constant against long double evaluation") {
  for (int d = 3; d <= 10; ++d) {
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double vd = std::pow(pi, d / 2.0L) / std::tgamma(d / 2.0L + 1.0L);
    const long double c = std::exp(-1.5L) * std::pow(3.0L, -d / 2.0L) * vd / 7.0L;
    CHECK(paley_zygmund_constant(d) == Approx(static_cast<double>(c)).epsilon(1e-13));
    CHECK(paley_zygmund_constant(d) > 0.0);
  }
  CHECK(paley_zygmund_constant(3) == Approx(0.025696).epsilon(1e-4));
  CHECK(paley_zygmund_constant(4) == Approx(0.0174778).epsilon(1e-5));
  CHECK_THROWS_AS(paley_zygmund_constant(2), DomainError);
  CHECK_THROWS_AS(paley_zygmund_constant(1), DomainError);
}

TEST_CASE("radial Gaussian tail") {
  // d = 1: P(|a + W_t| ... ) reduces to the two-sided normal tail.
  CHECK(radial_gaussian_tail(1, 1.0, 1.0) == Approx(boost::math::erfc(1.0 / std::sqrt(2.0))).epsilon(1e-13));
  CHECK(radial_gaussian_tail(3, 0.0, 1.0) == Approx(1.0));
}
