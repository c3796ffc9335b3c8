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

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "sbm/analytic.hpp"
#include "sbm/moments.hpp"

using namespace sbm;

namespace {

double Phi(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2); }

// P_s 1_{[-r, r]}(y) in d = 1.
double interval_prob(double s, double r, double y) {
  const double sd = std::sqrt(s);
  return Phi((r - y) / sd) - Phi((-r - y) / sd);
}

// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("first moment closed forms") {
  const std::vector<double> x0 = {0.0};
  CHECK(moment1(1.0, BallSpec::centered(1, 1.0), x0) == doctest::Approx(0.682689492137).epsilon(1e-10));
  const std::vector<double> x3 = {0.0, 0.0, 0.0};
  CHECK(moment1(1.0, BallSpec::centered(3, 60.0), x3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment1(2.0, BallSpec::centered(2, 0.0), std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("first moment against the non-central chi-squared law") {
  for (int d : {2, 3, 4, 5}) {
    for (double a : {0.0, 0.4, 1.5, 3.0}) {
      for (double t : {0.3, 1.0, 4.0}) {
        const double r = 1.2;
        std::vector<double> x(static_cast<size_t>(d), 0.0);
        x[0] = a;
        double ref;
        if (a == 0.0) {
          ref = boost::math::gamma_p(d / 2.0, r * r / (2.0 * t));
        } else {
          boost::math::non_central_chi_squared nc(d, a * a / t);
          ref = boost::math::cdf(nc, r * r / t);
        }
        CHECK(moment1(t, BallSpec::centered(d, r), x) == doctest::Approx(ref).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("first-moment lower bound for t >= r^2") {
  for (int d : {3, 4}) {
    for (double r : {0.5, 1.0}) {
      for (double t : {r * r, 2.0, 5.0}) {
        for (double a : {0.0, 0.7, 2.0}) {
          std::vector<double> x(static_cast<size_t>(d), 0.0);
          x[0] = a;
          const double bound =
              std::exp(-1.5) * std::pow(3.0, -d / 2.0) * ball_volume(d, 1.0) * std::pow(r, d) * heat_kernel(t / 3.0, x);
          CHECK(moment1(t, BallSpec::centered(d, r), x) >= bound);
        }
      }
    }
  }
}

TEST_CASE("second moment against an independent Simpson oracle in d = 1") {
  for (double a : {0.0, 0.8}) {
    const double t = 1.0, r = 1.0;
    const std::vector<double> x = {a};
    const double m1 = moment1(t, BallSpec::centered(1, r), x);
    // int_0^t P_s[(P_{t-s} 1)^2](x) ds with s = t - v^2 to absorb the sqrt singularity at s = t.
    auto inner = [&](double s) {
      const double sd = std::sqrt(s);
      return simpson(
          [&](double z) {
            const double y = a + sd * z;
            const double q = interval_prob(t - s, r, y);
            return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi) * q * q;
          },
          -9.0, 9.0, 600);
    };
    const double I = simpson(
        [&](double v) {
          const double s = t - v * v;
          if (s <= 0.0) return 2.0 * v * std::pow(interval_prob(t, r, a), 2);
          return 2.0 * v * inner(s);
        },
        0.0, std::sqrt(t), 400);
    CHECK(moment2_integral(t, BallSpec::centered(1, r), x) == doctest::Approx(I).epsilon(1e-6));
    CHECK(moment2(t, BallSpec::centered(1, r), x) == doctest::Approx(m1 * m1 + 2.0 * I).epsilon(1e-6));
  }
}

TEST_CASE("second moment dominates the squared first moment") {
  for (int d : {1, 2, 3}) {
    std::vector<double> x(static_cast<size_t>(d), 0.0);
    x[0] = 0.5;
    for (double t : {0.2, 1.0, 3.0}) {
      const BallSpec b = BallSpec::centered(d, 1.0);
      const double m1 = moment1(t, b, x);
      CHECK(moment2(t, b, x) >= m1 * m1);
    }
  }
}

TEST_CASE("second-moment time integral bound for t >= r^2 in d = 3") {
  for (double r : {0.5, 1.0}) {
    for (double t : {r * r, 2.0, 4.0}) {
      for (double a : {0.0, 1.0}) {
        const std::vector<double> x = {a, 0.0, 0.0};
        const BallSpec b = BallSpec::centered(3, r);
        CHECK(moment2_integral(t, b, x) <= 3.0 * r * r * moment1(t, b, x));
      }
    }
  }
}

TEST_CASE("chi-squared value at d = 3") {
  const std::vector<double> x = {0.0, 0.0, 0.0};
  const BallSpec b = BallSpec::centered(3, 1.0);
  CHECK(moment1(1.0, b, x) == doctest::Approx(0.1987480431).epsilon(1e-9));
  CHECK(moment1(1.0, b, x) == doctest::Approx(boost::math::gamma_p(1.5, 0.5)).epsilon(1e-12));
}

TEST_CASE("radial density integrates to one") {
  for (int d : {1, 2, 3, 5}) {
    for (double a : {0.0, 1.3}) {
      const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double rho) { return radial_density(d, a, 0.8, rho); }, 0.0, 20.0, 15, 1e-12);
      CHECK(I == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}
