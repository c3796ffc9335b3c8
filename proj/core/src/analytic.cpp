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

#include "sbm/analytic.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "sbm/errors.hpp"

namespace sbm {

double heat_kernel_radial(double t, double rho, int d) {
  if (!(t > 0.0)) throw DomainError("heat_kernel: t must be > 0");
  return std::pow(2.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-rho * rho / (2.0 * t));
}

double heat_kernel(double t, std::span<const double> x) {
  return heat_kernel_radial(t, norm(x), static_cast<int>(x.size()));
}

double csbp_laplace(const CsbpParams& p) {
  if (!(p.t > 0.0)) throw DomainError("csbp_laplace: t must be > 0");
  if (!(p.theta > 0.0)) throw DomainError("csbp_laplace: theta must be > 0");
  if (!(p.m >= 0.0)) throw DomainError("csbp_laplace: m must be >= 0");
  if (std::isinf(p.m)) return 0.0;
  if (std::isinf(p.theta)) return csbp_extinction(p.m, p.t);
  return std::exp(-p.theta * p.m / (1.0 + p.theta * p.t));
}

double csbp_extinction(double m, double t, bool* underflow) {
  if (!(t > 0.0)) throw DomainError("csbp_extinction: t must be > 0");
  if (!(m >= 0.0)) throw DomainError("csbp_extinction: m must be >= 0");
  const double v = std::exp(-m / t);
  const bool tiny = v < 1e-300;
  if (underflow) *underflow = tiny;
  return tiny ? 0.0 : v;
}

double gaussian_hit_tail(double t, double distance) {
  if (!(t > 0.0)) throw DomainError("gaussian_hit_tail: t must be > 0");
  if (!(distance > 0.0)) throw DomainError("gaussian_hit_tail: distance must be > 0");
  const double v = 4.0 * std::sqrt(t) / (std::sqrt(std::numbers::pi) * distance) *
                   std::exp(-distance * distance / (4.0 * t));
  return std::min(v, 1.0);
}

double radial_gaussian_tail(int d, double a, double t) {
  if (!(t > 0.0)) throw DomainError("radial_gaussian_tail: t must be > 0");
  if (a <= 0.0) return 1.0;
  const double x = a * a / (2.0 * t);
  if (x > 740.0 + 0.5 * d * std::log(x)) return 0.0;
  return boost::math::gamma_q(0.5 * d, x);
}

double gamma_half_plus_one(int d) {
  if (d < 0) throw DomainError("gamma_half_plus_one: d must be >= 0");
  // Gamma(1) = 1, Gamma(3/2) = sqrt(pi)/2, Gamma(x + 1) = x Gamma(x).
  double g = (d % 2 == 0) ? 1.0 : 0.5 * std::sqrt(std::numbers::pi);
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) g *= 0.5 * k;
  return g;
}

double ball_volume(int d, double r) {
  if (d < 1) throw DomainError("ball_volume: d must be >= 1");
  if (!(r >= 0.0)) throw DomainError("ball_volume: r must be >= 0");
  return std::pow(std::numbers::pi, 0.5 * d) * std::pow(r, d) / gamma_half_plus_one(d);
}

double unit_sphere_area(int d) {
  if (d < 1) throw DomainError("unit_sphere_area: d must be >= 1");
  return d * ball_volume(d, 1.0);
}

double paley_zygmund_constant(int d) {
  if (d < 3) throw DomainError("paley_zygmund_constant: defined for d >= 3");
  return std::exp(-1.5) * std::pow(3.0, -0.5 * d) * ball_volume(d, 1.0) / 7.0;
}

}  // namespace sbm
