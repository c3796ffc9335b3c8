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

#include "sbm/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"

namespace sbm {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

// int_a^b f(rho) rho^{d-1} d rho for f linear; exact up to degree 19.
template <class F>
double cell_integral(int d, double a, double b, F&& f) {
  if (b <= a) return 0.0;
  return Gauss::integrate([&](double x) { return f(x) * std::pow(x, d - 1); }, a, b);
}

struct Tridiag {
  std::vector<double> lower, diag, upper, work;
};

// Backward Euler for m u' = 1/2 (a+ (u_{j+1} - u_j) - a- (u_j - u_{j-1})), u_M = 0.
void diffuse(const std::vector<double>& m, const std::vector<double>& face, double dt, std::vector<double>& u,
             Tridiag& T) {
  const size_t n = u.size() - 1;  // unknowns 0..n-1
  T.diag.resize(n);
  T.upper.resize(n);
  T.work.resize(n);
  const double c = 0.5 * dt;
  for (size_t j = 0; j < n; ++j) {
    const double am = j == 0 ? 0.0 : face[j - 1];
    const double ap = face[j];
    T.diag[j] = m[j] + c * (am + ap);
    T.upper[j] = -c * ap;
    u[j] *= m[j];
  }
  // Forward sweep; lower coefficient of row j is -c * face[j-1] = upper[j-1].
  T.work[0] = T.diag[0];
  for (size_t j = 1; j < n; ++j) {
    const double l = T.upper[j - 1] / T.work[j - 1];
    T.work[j] = T.diag[j] - l * T.upper[j - 1];
    u[j] -= l * u[j - 1];
  }
  u[n - 1] /= T.work[n - 1];
  for (size_t j = n - 1; j-- > 0;) u[j] = (u[j] - T.upper[j] * u[j + 1]) / T.work[j];
  u[n] = 0.0;
}

void react(double dt, std::vector<double>& u) {
  for (double& v : u) v = v / (1.0 + v * dt);
}

double chi_tail_bound(int d, double r, double amplitude, double start, double t, double rho) {
  const double s = t - start;
  if (!(s > 0.0)) return rho < r ? amplitude : 0.0;
  return amplitude * radial_gaussian_tail(d, rho - r, s);
}

struct HalfSpaceTable {
  static constexpr double kLeft = -6.0;
  static constexpr double kRight = 8.0;
  static constexpr double kStep = 1.0 / 1024.0;
  std::vector<double> g, gp;
  double excess = 0.0;

  HalfSpaceTable();
  double operator()(double xi) const;
};

// Integrates g'' = -xi g' - 2 g + 2 g^2 leftwards from the decaying tail
// g ~ A xi exp(-xi^2/2). Returns +1 if g overshoots 1, -1 if it turns over
// below 1, 0 if it reaches kLeft monotonically.
int shoot(double A, std::vector<double>* g, std::vector<double>* gp) {
  auto f = [](double x, double y, double yp) { return -x * yp - 2.0 * y + 2.0 * y * y; };
  const double L = HalfSpaceTable::kRight;
  const double e = std::exp(-0.5 * L * L);
  double x = L, y = A * L * e, yp = A * (1.0 - L * L) * e;
  const double hs = -HalfSpaceTable::kStep;
  const int n = static_cast<int>(std::lround((L - HalfSpaceTable::kLeft) / HalfSpaceTable::kStep));
  if (g) {
    g->assign(1, y);
    gp->assign(1, yp);
  }
  for (int i = 0; i < n; ++i) {
    const double k1 = yp, l1 = f(x, y, yp);
    const double k2 = yp + 0.5 * hs * l1, l2 = f(x + 0.5 * hs, y + 0.5 * hs * k1, yp + 0.5 * hs * l1);
    const double k3 = yp + 0.5 * hs * l2, l3 = f(x + 0.5 * hs, y + 0.5 * hs * k2, yp + 0.5 * hs * l2);
    const double k4 = yp + hs * l3, l4 = f(x + hs, y + hs * k3, yp + hs * l3);
    y += hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    yp += hs / 6.0 * (l1 + 2 * l2 + 2 * l3 + l4);
    x += hs;
    if (y > 1.0) return +1;
    if (yp > 0.0) return -1;
    if (g) {
      g->push_back(y);
      gp->push_back(yp);
    }
  }
  return 0;
}

HalfSpaceTable::HalfSpaceTable() {
  double lo = std::log(1e-3), hi = std::log(1e6);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shoot(std::exp(mid), nullptr, nullptr) > 0)
      hi = mid;
    else
      lo = mid;
  }
  // The lower shot may turn over close to kLeft where 1 - g is below 1e-11;
  // pad with g = 1 from there on.
  shoot(std::exp(lo), &g, &gp);
  const size_t n = static_cast<size_t>(std::lround((kRight - kLeft) / kStep)) + 1;
  while (g.size() < n) {
    g.push_back(1.0);
    gp.push_back(0.0);
  }
  std::reverse(g.begin(), g.end());
  std::reverse(gp.begin(), gp.end());
  // Trapezoid with end corrections is ample at this step.
  for (size_t i = 0; i + 1 < n; ++i) {
    const double x = kLeft + kStep * static_cast<double>(i);
    const double a = x + 0.5 * kStep < 0.0 ? g[i] - 1.0 : g[i];
    const double b = x + 0.5 * kStep < 0.0 ? g[i + 1] - 1.0 : g[i + 1];
    excess += 0.5 * kStep * (a + b) + kStep * kStep / 12.0 * (gp[i] - gp[i + 1]);
  }
}

double HalfSpaceTable::operator()(double xi) const {
  if (xi <= kLeft) return 1.0;
  if (xi >= kRight) return 0.0;
  const double s = (xi - kLeft) / kStep;
  const size_t i = std::min(static_cast<size_t>(s), g.size() - 2);
  const double u = s - static_cast<double>(i);
  // Cubic Hermite on (g, g').
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * g[i] + h10 * kStep * gp[i] + h01 * g[i + 1] + h11 * kStep * gp[i + 1];
}

const HalfSpaceTable& half_space_table() {
  static const HalfSpaceTable table;
  return table;
}

}  // namespace

double half_space_profile(double xi) { return half_space_table()(xi); }
double half_space_excess() { return half_space_table().excess; }

void PdeConfig::validate() const {
  if (d < 1) throw ConfigError("pde.d", "must be >= 1");
  if (!(r > 0.0)) throw ConfigError("pde.r", "must be > 0");
  if (!(t_final > 0.0)) throw ConfigError("pde.t_final", "must be > 0");
  if (mode != InitialMode::theta && !(t0 > 0.0 && t0 < t_final))
    throw ConfigError("pde.t0", "must satisfy 0 < t0 < t_final");
  if (mode == InitialMode::theta && !(theta > 0.0)) throw ConfigError("pde.theta", "must be > 0 in theta mode");
  if (!(Rmax > r)) throw ConfigError("pde.Rmax", "must exceed the ball radius");
  if (M < 2) throw ConfigError("pde.M", "must be >= 2");
  if (mode != InitialMode::uniform && r / (Rmax / M) < 20.0 - 1e-9)
    throw ConfigError("pde.M", "grid must have at least 20 cells across the ball");
  if (!(tolerance > 0.0)) throw ConfigError("pde.tolerance", "must be > 0");
  for (double th : theta_ramp)
    if (!(th > 0.0)) throw ConfigError("pde.theta_ramp", "entries must be > 0");
}

double PdeConfig::support_radius() const noexcept {
  return mode == InitialMode::layer ? r + 8.0 * std::sqrt(t0) : r;
}

std::size_t PdeSolution::index_of(double t) const {
  for (size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - t) <= 1e-12 * std::max(1.0, t)) return i;
  throw DomainError("time " + std::to_string(t) + " is not an output time of the solution");
}

double boundary_bound(int d, double r, double amplitude, double start, double t, double R) {
  return std::min(1.0 / t, chi_tail_bound(d, r, amplitude, start, t, R));
}

double tail_bound(int d, double r, double amplitude, double start, double t, double R) {
  const double s = t - start;
  if (!(s > 0.0)) return R >= r ? 0.0 : std::numeric_limits<double>::infinity();
  const double area = unit_sphere_area(d);
  auto f = [&](double rho) {
    return area * std::pow(rho, d - 1) * std::min(1.0 / t, chi_tail_bound(d, r, amplitude, start, t, rho));
  };
  const double end = std::max(R, r) + 45.0 * std::sqrt(s) + 10.0;
  if (end <= R) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, R, end, 20, 1e-12);
}

PdeConfig auto_config(int d, double r, double t_final, double h, double tolerance) {
  PdeConfig c;
  c.d = d;
  c.r = r;
  c.t_final = t_final;
  c.tolerance = tolerance;
  c.mode = InitialMode::layer;
  const double cells_per_r = std::max(20.0, std::ceil(r / h - 1e-9));
  c.h = r / cells_per_r;
  // Ten cells across the initial boundary layer.
  c.t0 = std::min(100.0 * c.h * c.h, 0.1 * t_final);
  fit_outer_radius(c);
  return c;
}

void fit_outer_radius(PdeConfig& c) {
  const double amp = c.amplitude();
  const double start = c.start_time();
  const double rs = c.support_radius();
  const double ref = ball_volume(c.d, c.r) / c.t_final;
  auto total = [&](double R) {
    return tail_bound(c.d, rs, amp, start, c.t_final, R) +
           boundary_bound(c.d, rs, amp, start, c.t_final, R) * ball_volume(c.d, R);
  };
  auto ok = [&](double R) {
    return total(R) <= c.tail_budget * ref &&
           boundary_bound(c.d, rs, amp, start, c.t_final, R) <= c.tail_budget / c.t_final;
  };
  double lo = rs, hi = rs + 4.0 * std::sqrt(c.t_final) + 1.0;
  while (!ok(hi)) hi = rs + 2.0 * (hi - rs);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  c.M = static_cast<int>(std::ceil(hi / c.h));
  c.Rmax = c.M * c.h;
}

std::vector<double> lumped_weights(int d, const std::vector<double>& grid) {
  const size_t n = grid.size();
  const double area = unit_sphere_area(d);
  std::vector<double> w(n, 0.0);
  for (size_t j = 0; j + 1 < n; ++j) {
    const double a = grid[j], b = grid[j + 1];
    const double len = b - a;
    w[j] += area * cell_integral(d, a, b, [&](double x) { return (b - x) / len; });
    w[j + 1] += area * cell_integral(d, a, b, [&](double x) { return (x - a) / len; });
  }
  return w;
}

double mass_integral(int d, const std::vector<double>& grid, const std::vector<double>& u) {
  const auto w = lumped_weights(d, grid);
  double s = 0.0;
  for (size_t j = 0; j < w.size(); ++j) s += w[j] * u[j];
  return s;
}

double mass_integral(const PdeSolution& sol, double t) { return sol.mass[sol.index_of(t)]; }

double empty_prob_poisson(const PdeSolution& sol, double t) { return std::exp(-sol.poisson_mass[sol.index_of(t)]); }

double empty_prob_lebesgue(const PdeSolution& sol, double t) { return std::exp(-sol.mass[sol.index_of(t)]); }

double empty_prob_atoms(const PdeSolution& sol, double t, double N) {
  const size_t i = sol.index_of(t);
  if (sol.profiles.empty()) throw DomainError("empty_prob_atoms needs stored profiles");
  const auto& u = sol.profiles[i];
  double s = sol.tail[i];
  for (size_t j = 0; j < u.size(); ++j) {
    const double v = std::min(1.0, u[j] / N);
    s += sol.weights[j] * -std::expm1(N * std::log1p(-v));
  }
  return std::exp(-s);
}

PdeSolution solve_radial(const PdeConfig& c) {
  c.validate();
  PdeSolution sol;
  sol.d = c.d;
  sol.r = c.r;
  sol.support_radius = c.support_radius();
  sol.amplitude = c.amplitude();
  sol.start_time = c.start_time();
  const int d = c.d;
  const size_t M = static_cast<size_t>(c.M);
  const double h = c.Rmax / c.M;
  sol.grid.resize(M + 1);
  for (size_t j = 0; j <= M; ++j) sol.grid[j] = h * static_cast<double>(j);
  sol.grid[M] = c.Rmax;
  sol.weights = lumped_weights(d, sol.grid);
  const double area = unit_sphere_area(d);
  std::vector<double> face(M);
  for (size_t j = 0; j < M; ++j)
    face[j] = area * (std::pow(sol.grid[j + 1], d) - std::pow(sol.grid[j], d)) / (d * h * h);

  // Initial datum: amplitude times the lumped projection of the ball indicator.
  std::vector<double> u(M + 1, 0.0);
  const double A = sol.amplitude;
  if (c.mode == InitialMode::uniform) {
    std::fill(u.begin(), u.end(), A);
  } else if (c.mode == InitialMode::layer) {
    const double s = std::sqrt(c.t0);
    for (size_t j = 0; j < M; ++j) u[j] = A * half_space_profile((sol.grid[j] - c.r) / s);
  } else {
    std::vector<double> inside(M + 1, 0.0);
    for (size_t j = 0; j < M; ++j) {
      const double a = sol.grid[j], b = std::min(sol.grid[j + 1], c.r);
      if (b <= a) break;
      const double len = sol.grid[j + 1] - a;
      inside[j] += area * cell_integral(d, a, b, [&](double x) { return (sol.grid[j + 1] - x) / len; });
      inside[j + 1] += area * cell_integral(d, a, b, [&](double x) { return (x - a) / len; });
    }
    for (size_t j = 0; j < M; ++j) u[j] = A * std::min(1.0, inside[j] / sol.weights[j]);
  }

  std::vector<double> outs = c.output_times;
  outs.push_back(c.t_final);
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  outs.erase(std::remove_if(outs.begin(), outs.end(),
                            [&](double t) { return !(t > sol.start_time) || t > c.t_final; }),
             outs.end());

  const bool diffusion = c.mode != InitialMode::uniform;
  Tridiag T;
  auto step = [&](double dt, std::vector<double>& v) {
    react(dt, v);
    if (diffusion) diffuse(sol.weights, face, dt, v, T);
  };
  auto record = [&](double t) {
    double I = 0.0, J = 0.0;
    for (size_t j = 0; j <= M; ++j) {
      I += sol.weights[j] * u[j];
      J += sol.weights[j] * -std::expm1(-u[j]);
    }
    const double tb = diffusion ? tail_bound(d, sol.support_radius, A, sol.start_time, t, c.Rmax) : 0.0;
    sol.times.push_back(t);
    sol.mass.push_back(I + tb);
    sol.poisson_mass.push_back(J + tb);
    sol.tail.push_back(tb);
    if (c.keep_profiles) sol.profiles.push_back(u);
  };
  auto check = [&](double t) {
    double mx = 0.0;
    for (double v : u) mx = std::max(mx, v);
    sol.max_ut = std::max(sol.max_ut, mx * t);
    if (mx * t > 1.0 + 1e-12)
      throw InvariantViolation("discretization failure: max u * t = " + std::to_string(mx * t) +
                               " exceeds the exact bound u <= 1/t at t = " + std::to_string(t));
    if (c.mode == InitialMode::uniform)
      for (double v : u) sol.uniform_error = std::max(sol.uniform_error, std::fabs(v - 1.0 / t));
  };

  if (diffusion) {
    const double b = boundary_bound(d, sol.support_radius, A, sol.start_time, c.t_final, c.Rmax);
    if (b > c.tail_budget / c.t_final)
      throw DomainTooSmall("outer radius " + std::to_string(c.Rmax) + " too small: boundary bound " +
                           std::to_string(b) + " exceeds tail budget; enlarge the domain");
  }

  double t = sol.start_time;
  double dt = c.mode == InitialMode::theta ? c.tolerance / c.theta : c.tolerance * c.t0;
  std::vector<double> full, half;
  size_t next = 0;
  while (next < outs.size()) {
    const double target = outs[next];
    double trial = c.adaptive ? dt : c.fixed_ratio * std::max(t, c.tolerance / std::max(A, 1.0));
    bool hit = false;
    if (t + trial >= target * (1.0 - 1e-14)) {
      trial = target - t;
      hit = true;
    }
    if (c.adaptive) {
      full = u;
      step(trial, full);
      half = u;
      step(0.5 * trial, half);
      step(0.5 * trial, half);
      double err = 0.0, scale = 0.0;
      for (size_t j = 0; j <= M; ++j) {
        err = std::max(err, std::fabs(full[j] - half[j]));
        scale = std::max(scale, std::fabs(half[j]));
      }
      err = scale > 0.0 ? err / scale : 0.0;
      const double factor = err > 0.0 ? std::clamp(0.9 * std::sqrt(c.tolerance / err), 0.2, 2.0) : 2.0;
      if (err > c.tolerance && trial > 1e-300) {
        ++sol.rejected;
        dt = trial * factor;
        continue;
      }
      u.swap(half);
      if (!hit) dt = trial * factor;
    } else {
      step(trial, u);
    }
    t = hit ? target : t + trial;
    ++sol.steps;
    check(t);
    if (hit) {
      record(t);
      ++next;
    }
  }
  return sol;
}

}  // namespace sbm
