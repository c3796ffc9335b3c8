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

#pragma once

#include <span>

#include "sbm/geometry.hpp"

namespace sbm {

struct CsbpParams {
  double m = 0.0;      // initial mass, may be +inf
  double t = 1.0;
  double theta = 1.0;  // Laplace argument
};

// Gaussian transition density of Brownian motion with variance t per coordinate.
double heat_kernel(double t, std::span<const double> x);
double heat_kernel_radial(double t, double rho, int d);

// E_m[exp(-theta X_t)] for the Feller diffusion with psi(u) = u^2.
double csbp_laplace(const CsbpParams& p);

// P_m(X_t = 0) = exp(-m/t). Results below 1e-300 are returned as 0 and
// flagged through `underflow` when given.
double csbp_extinction(double m, double t, bool* underflow = nullptr);

// Upper bound 4 sqrt(t) / (sqrt(pi) a) exp(-a^2 / (4t)) on the chance that a
// Brownian path started at gap a from a ball enters it before t. Clamped to 1.
double gaussian_hit_tail(double t, double distance);

// P(|W_t| > a) for a d-dimensional Brownian motion, i.e. Q(d/2, a^2/(2t)).
double radial_gaussian_tail(int d, double a, double t);

// Gamma(d/2 + 1) in closed form for integer d.
double gamma_half_plus_one(int d);
double ball_volume(int d, double r);
// Surface area of the unit sphere in R^d (s_0 = 2 for the two points of S^0).
double unit_sphere_area(int d);

// e^{-3/2} 3^{-d/2} v_d(1) / 7, defined for d >= 3.
double paley_zygmund_constant(int d);

}  // namespace sbm
