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

#include <cstdint>
#include <vector>

namespace sbm {

// How the blow-up datum "infinity on the ball" is regularized.
enum class InitialMode {
  exact,    // u(t0) = 1/t0 on the ball, the largest value compatible with u <= 1/t
  layer,    // u(t0) = g((rho - r)/sqrt(t0)) / t0 with g the half-space profile
  theta,    // u(0) = theta on the ball
  uniform,  // u(t0) = 1/t0 everywhere and no diffusion; self-test of the reaction step
};

struct PdeConfig {
  int d = 3;
  double r = 1.0;            // ball radius
  double Rmax = 0.0;         // outer radius; 0 selects it from the tail budget
  int M = 0;                 // number of cells; 0 derives it from h
  double h = 0.0;            // grid spacing used when M == 0
  double t0 = 1e-3;          // regularization time for exact and uniform modes
  double t_final = 1.0;
  InitialMode mode = InitialMode::exact;
  double theta = 0.0;
  std::vector<double> theta_ramp;  // finite thetas for the theta -> infinity check
  double tolerance = 1e-5;         // relative local error per step
  double tail_budget = 1e-6;       // relative budget for everything beyond Rmax
  bool adaptive = true;
  double fixed_ratio = 0.01;       // dt = fixed_ratio * t when not adaptive
  std::vector<double> output_times;  // t_final is always added
  bool keep_profiles = true;

  void validate() const;
  double start_time() const noexcept { return mode == InitialMode::theta ? 0.0 : t0; }
  double amplitude() const noexcept { return mode == InitialMode::theta ? theta : 1.0 / t0; }
  // Radius outside which the initial datum vanishes.
  double support_radius() const noexcept;
};

struct PdeSolution {
  int d = 3;
  double r = 1.0;
  double support_radius = 1.0;
  double amplitude = 0.0;
  double start_time = 0.0;
  std::vector<double> grid;     // rho_0 = 0 < ... < rho_M = Rmax
  std::vector<double> weights;  // lumped masses including the sphere area
  std::vector<double> times;
  std::vector<std::vector<double>> profiles;  // empty when profiles are not kept
  std::vector<double> mass;          // integral of u over R^d, tail included
  std::vector<double> poisson_mass;  // integral of 1 - exp(-u) over R^d, tail included
  std::vector<double> tail;          // certified bound on the part beyond Rmax
  double max_ut = 0.0;               // max over nodes and accepted steps of u * t
  double uniform_error = 0.0;        // max |u - 1/t| in uniform mode
  std::uint64_t steps = 0;
  std::uint64_t rejected = 0;

  std::size_t index_of(double t) const;
};

// Self-similar profile of the half-space problem: u(t, x) = g(x_1/sqrt(t))/t
// solves u_t = u''/2 - u^2 with u(0) = infinity on {x_1 < 0}. g solves
// g''/2 + xi g'/2 + g - g^2 = 0 with g(-inf) = 1 and g(+inf) = 0.
double half_space_profile(double xi);
// int_0^inf g - int_{-inf}^0 (1 - g): excess mass per unit boundary area.
double half_space_excess();

// Layer-mode configuration with spacing about h and Rmax from the tail budget.
PdeConfig auto_config(int d, double r, double t_final, double h, double tolerance = 1e-5);
// Sets M and Rmax from c.h, the initial datum and the tail budget.
void fit_outer_radius(PdeConfig& c);

PdeSolution solve_radial(const PdeConfig& config);

// Lumped masses s_{d-1} int phi_j rho^{d-1} of the P1 hat functions on a uniform grid.
std::vector<double> lumped_weights(int d, const std::vector<double>& grid);
// Integral over R^d of the radial P1 interpolant of the nodal values.
double mass_integral(int d, const std::vector<double>& grid, const std::vector<double>& u);
double mass_integral(const PdeSolution& sol, double t);
// exp(-int (1 - e^{-u})): empty-ball probability from a Poisson random measure start.
double empty_prob_poisson(const PdeSolution& sol, double t);
// exp(-int u): empty-ball probability from Lebesgue measure.
double empty_prob_lebesgue(const PdeSolution& sol, double t);
// Empty-ball probability of N-particle unit atoms of a Poisson random measure:
// exp(-int (1 - (1 - u/N)^N)). Exact for the particle system when theta = N.
double empty_prob_atoms(const PdeSolution& sol, double t, double N);

// Certified bound on int_{|x| > R} u(t, x) dx from u <= min(1/t, A P(|x + W| < r)).
double tail_bound(int d, double r, double amplitude, double start_time, double t, double R);
// Bound on u(t, x) at |x| = R.
double boundary_bound(int d, double r, double amplitude, double start_time, double t, double R);

}  // namespace sbm
