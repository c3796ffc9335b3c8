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

#include <string>
#include <vector>

#include "sbm/pde.hpp"

namespace sbm {

// Discretization of a mass series. Each series is four fixed-ratio solves,
// (q, t0), (q/2, t0), (q, t0/2), (q/2, t0/2), combined by Richardson
// extrapolation to remove the first-order splitting and regularization errors.
struct SeriesOptions {
  double h = 0.01;       // grid spacing for a unit ball at unit time
  double q = 0.005;      // dt / t
  double t0 = 0.01;      // regularization time; needs about ten cells across sqrt(t0)
  bool extrapolate = true;
  unsigned jobs = 1;
};

struct MassSeries {
  std::vector<double> times;
  std::vector<double> raw;           // finest of the four solves
  std::vector<double> extrapolated;  // Richardson-combined
  std::vector<double> poisson_raw;   // int (1 - e^{-u}) of the finest solve
  double max_ut = 0.0;
  int M = 0;
  double Rmax = 0.0;
};

// Solves for ball radius r up to the largest output time.
MassSeries mass_series(int d, double r, const std::vector<double>& times, const SeriesOptions& opt);

struct DiagnosticPoint {
  double t = 0.0;
  double I = 0.0;            // extrapolated mass integral
  double I_raw = 0.0;        // finest raw solve
  double limit_estimate = 0.0;  // extrapolation to t -> infinity using points up to t
  bool monotone = true;      // step from the previous point goes in the expected direction
};

struct LimitConstants {
  std::string kind;  // "d1_mass_limit", "A2" or "kappa"
  int d = 1;
  double value = 0.0;
  double r = 1.0;
  std::vector<DiagnosticPoint> diagnostics;
  std::string expected_direction;  // "increasing", "decreasing" or "none"
  bool monotone = true;            // all diagnostics past burn-in follow expected_direction
  double burn_in = 0.0;
  double extrapolation_residual = 0.0;  // change of the limit estimate over the last doubling
  double refinement_residual = 0.0;     // change under halving h, q and t0
  double theta_residual = -1.0;         // |layer - theta ramp| when computed, else -1
  double certified_tail = 0.0;
  bool converged = false;
  double max_ut = 0.0;
};

// Removes c1 t^{-1/2} and c2 t^{-1} from a doubling sequence x(t_k), t_{k+1} = 2 t_k.
// Returns one value per index starting at 2; earlier entries repeat the last available one.
std::vector<double> doubling_extrapolation(const std::vector<double>& x);

struct LimitOptions {
  SeriesOptions series;
  double t_start = 1.0;
  double t_max = 1024.0;
  double tolerance = 5e-4;  // relative stop rule on the limit estimate
  double burn_in = 4.0;
  bool refine = true;
  bool theta_ramp = false;
  std::vector<double> thetas = {100.0, 400.0, 1600.0};
};

// d = 1, ball B(r t): I(t) on t = t_start 2^k. The limit is 2r.
LimitConstants d1_mass_limit(double r, const LimitOptions& opt = {});
// d = 2: A_2(r) = I(1) for B(r).
LimitConstants a2_estimate(double r, const LimitOptions& opt = {});
// d >= 3: kappa_d = lim I(t) for B(1), I decreasing in t.
LimitConstants kappa_estimate(int d, const LimitOptions& opt = {});

struct ScalingReport {
  double max_relative_error = 0.0;
  std::vector<double> lhs_times;
  std::vector<double> lhs;  // I^r(t)
  std::vector<double> rhs;  // eps^{d-2} I^{r/eps}(t/eps^2)
};

// Checks I^r(t) = eps^{d-2} I^{r/eps}(t eps^{-2}) at t and t/2, t/4 with both
// sides solved on the same absolute grid spacing.
ScalingReport scaling_check(int d, double r, double eps, double t, const SeriesOptions& opt = {});

// I(t) for theta data extrapolated to theta -> infinity from a ramp with ratio 4.
double theta_extrapolated_mass(int d, double r, double t, const std::vector<double>& thetas, double h,
                               unsigned jobs = 1);

}  // namespace sbm
