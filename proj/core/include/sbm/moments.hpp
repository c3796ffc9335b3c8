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

// E_{delta_x}[X_t(B)] = P_t 1_B(x) = P(|x + W_t - center| < r).
double moment1(double t, const BallSpec& ball, std::span<const double> x);

// E_{delta_x}[X_t(B)^2] = (P_t 1_B(x))^2 + 2 int_0^t P_s[(P_{t-s} 1_B)^2](x) ds.
double moment2(double t, const BallSpec& ball, std::span<const double> x);

// The time integral in moment2 alone.
double moment2_integral(double t, const BallSpec& ball, std::span<const double> x);

// Density at rho of |a e + W_s| for a d-dimensional Brownian motion.
double radial_density(int d, double a, double s, double rho);

}  // namespace sbm
