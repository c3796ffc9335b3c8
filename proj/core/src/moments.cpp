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

#include "sbm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"

namespace sbm {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kTol = 1e-9;
constexpr unsigned kDepth = 18;

template <class F>
double integrate(F&& f, double a, double b, const char* what, double tol = kTol) {
  if (!(b > a)) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(f, a, b, kDepth, tol, &err, &l1);
  if (err > 1e3 * tol * l1 && err > 1e-11)
    throw DomainError(std::string(what) + ": quadrature did not converge (achieved " + std::to_string(err) + ")");
  return v;
}

// P(|a e + W_t| < R). Closed forms for d = 1, d = 3 and a = 0; otherwise
// integrate along the direction of e.
double ball_probability(int d, double a, double t, double R) {
  if (R <= 0.0) return 0.0;
  const double sd = std::sqrt(t);
  const double k = 1.0 / (sd * std::numbers::sqrt2);
  if (d == 1) return 0.5 * (boost::math::erfc((-R - a) * k) - boost::math::erfc((R - a) * k));
  if (a == 0.0) return boost::math::gamma_p(0.5 * d, R * R / (2.0 * t));
  if (d == 3) {
    const double phi_m = std::exp(-0.5 * (R - a) * (R - a) / t), phi_p = std::exp(-0.5 * (R + a) * (R + a) / t);
    const double gauss = 0.5 * (boost::math::erfc((-R - a) * k) - boost::math::erfc((R - a) * k));
    return gauss - sd / (a * std::sqrt(2.0 * std::numbers::pi)) * (phi_m - phi_p);
  }
  const double lo = std::max(-R, a - 12.0 * sd), hi = std::min(R, a + 12.0 * sd);
  if (!(hi > lo)) return 0.0;
  // z = R sin(phi) removes the square-root behaviour of the slice mass at z = +-R.
  auto f = [&](double phi) {
    const double z = R * std::sin(phi), c = R * std::cos(phi);
    const double dz = z - a;
    return c * std::exp(-dz * dz / (2.0 * t)) / (sd * std::sqrt(2.0 * std::numbers::pi)) *
           boost::math::gamma_p(0.5 * (d - 1), c * c / (2.0 * t));
  };
  const double p_lo = std::asin(std::clamp(lo / R, -1.0, 1.0)), p_hi = std::asin(std::clamp(hi / R, -1.0, 1.0));
  return integrate(f, p_lo, p_hi, "moment1");
}

double offset(const BallSpec& ball, std::span<const double> x) {
  if (static_cast<int>(x.size()) != ball.dim()) throw DomainError("moment: point and ball dimensions differ");
  return distance(x, ball.center);
}

}  // namespace

double radial_density(int d, double a, double s, double rho) {
  if (rho <= 0.0) return 0.0;
  if (a == 0.0) {
    boost::math::chi_squared_distribution<double> chi(d);
    return boost::math::pdf(chi, rho * rho / s) * 2.0 * rho / s;
  }
  boost::math::non_central_chi_squared_distribution<double> nc(d, a * a / s);
  return boost::math::pdf(nc, rho * rho / s) * 2.0 * rho / s;
}

double moment1(double t, const BallSpec& ball, std::span<const double> x) {
  if (!(t > 0.0)) throw DomainError("moment1: t must be > 0");
  return ball_probability(ball.dim(), offset(ball, x), t, ball.radius);
}

double moment2_integral(double t, const BallSpec& ball, std::span<const double> x) {
  if (!(t > 0.0)) throw DomainError("moment2: t must be > 0");
  const int d = ball.dim();
  const double a = offset(ball, x);
  const double R = ball.radius;
  if (R <= 0.0) return 0.0;
  // P_s[g](x) with g(rho) = P_{t-s} 1_B at distance rho, squared.
  auto inner = [&](double s) {
    const double tau = t - s;
    if (tau <= 0.0) return 0.0;
    const double sd = std::sqrt(s);
    auto g2 = [&](double rho) {
      const double f = ball_probability(d, rho, tau, R);
      return f * f;
    };
    if (s < 1e-14) return g2(a);
    const double lo = std::max(0.0, a - 12.0 * sd);
    const double hi = std::min(a + 12.0 * sd, R + 12.0 * std::sqrt(tau));
    if (!(hi > lo)) return 0.0;
    auto f = [&](double rho) { return radial_density(d, a, s, rho) * g2(rho); };
    if (R > lo && R < hi) return integrate(f, lo, R, "moment2") + integrate(f, R, hi, "moment2");
    return integrate(f, lo, hi, "moment2");
  };
  // s = t - v^2 removes the sqrt(t - s) behaviour as the kernel sharpens.
  auto outer = [&](double v) { return 2.0 * v * inner(t - v * v); };
  return integrate(outer, 0.0, std::sqrt(t), "moment2 time integral", 1e-8);
}

double moment2(double t, const BallSpec& ball, std::span<const double> x) {
  const double m1 = moment1(t, ball, x);
  return m1 * m1 + 2.0 * moment2_integral(t, ball, x);
}

}  // namespace sbm
