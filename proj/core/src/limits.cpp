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

#include "sbm/limits.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"
#include "sbm/parallel.hpp"

namespace sbm {

namespace {

PdeConfig series_config(int d, double r, double t_final, double h, double q, double t0) {
  PdeConfig c;
  c.d = d;
  c.r = r;
  c.t_final = t_final;
  c.mode = InitialMode::layer;
  c.h = h;
  c.t0 = t0;
  c.adaptive = false;
  c.fixed_ratio = q;
  c.keep_profiles = false;
  fit_outer_radius(c);
  return c;
}

std::vector<double> doubling_times(double t_start, double t_max) {
  std::vector<double> ts;
  for (double t = t_start; t <= t_max * (1.0 + 1e-12); t *= 2.0) ts.push_back(t);
  if (ts.size() < 3) throw DomainError("need at least three doubling times between t_start and t_max");
  return ts;
}

void fill_estimates(LimitConstants& L, const std::vector<double>& times, const MassSeries& s, bool increasing,
                    double tolerance) {
  const auto est = doubling_extrapolation(s.extrapolated);
  L.diagnostics.clear();
  L.monotone = true;
  for (size_t i = 0; i < times.size(); ++i) {
    DiagnosticPoint p;
    p.t = times[i];
    p.I = s.extrapolated[i];
    p.I_raw = s.raw[i];
    p.limit_estimate = est[i];
    if (i > 0) {
      const double prev = s.extrapolated[i - 1], prev_raw = s.raw[i - 1];
      p.monotone = increasing ? (p.I > prev && p.I_raw > prev_raw) : (p.I <= prev && p.I_raw <= prev_raw);
      if (p.t > L.burn_in && !p.monotone) L.monotone = false;
    }
    L.diagnostics.push_back(p);
  }
  const size_t n = est.size();
  L.value = est[n - 1];
  L.extrapolation_residual = std::fabs(est[n - 1] - est[n - 2]);
  L.converged = L.extrapolation_residual < tolerance * std::fabs(L.value);
  L.max_ut = s.max_ut;
}

SeriesOptions refined(const SeriesOptions& o) {
  SeriesOptions f = o;
  f.h *= 0.5;
  f.q *= 0.5;
  f.t0 *= 0.5;
  return f;
}

}  // namespace

MassSeries mass_series(int d, double r, const std::vector<double>& times, const SeriesOptions& opt) {
  if (times.empty()) throw DomainError("mass_series: no output times");
  const double t_final = *std::max_element(times.begin(), times.end());
  const double qs[4] = {opt.q, opt.q / 2, opt.q, opt.q / 2};
  const double t0s[4] = {opt.t0, opt.t0, opt.t0 / 2, opt.t0 / 2};
  const size_t runs = opt.extrapolate ? 4 : 1;
  std::vector<PdeSolution> sol(runs);
  std::vector<PdeConfig> cfg(runs);
  for (size_t k = 0; k < runs; ++k) {
    const size_t idx = opt.extrapolate ? k : 3;
    cfg[k] = series_config(d, r, t_final, opt.h, qs[idx], t0s[idx]);
    cfg[k].output_times = times;
  }
  parallel_for(runs, opt.jobs, [&](size_t k) { sol[k] = solve_radial(cfg[k]); });
  MassSeries s;
  const PdeSolution& fine = sol[runs - 1];
  s.M = cfg[runs - 1].M;
  s.Rmax = cfg[runs - 1].Rmax;
  for (double t : times) {
    const size_t i = fine.index_of(t);
    s.times.push_back(t);
    s.raw.push_back(fine.mass[i]);
    s.poisson_raw.push_back(fine.poisson_mass[i]);
    if (opt.extrapolate) {
      const double a = sol[0].mass[sol[0].index_of(t)], b = sol[1].mass[sol[1].index_of(t)];
      const double c = sol[2].mass[sol[2].index_of(t)], e = fine.mass[i];
      s.extrapolated.push_back(4.0 * e - 2.0 * b - 2.0 * c + a);
    } else {
      s.extrapolated.push_back(fine.mass[i]);
    }
  }
  for (const auto& x : sol) s.max_ut = std::max(s.max_ut, x.max_ut);
  return s;
}

std::vector<double> doubling_extrapolation(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  const double s2 = std::sqrt(2.0);
  std::vector<double> r1(n);
  r1[0] = x[0];
  for (size_t i = 1; i < n; ++i) r1[i] = (s2 * x[i] - x[i - 1]) / (s2 - 1.0);
  out[0] = x[0];
  if (n > 1) out[1] = r1[1];
  for (size_t i = 2; i < n; ++i) out[i] = 2.0 * r1[i] - r1[i - 1];
  return out;
}

LimitConstants kappa_estimate(int d, const LimitOptions& opt) {
  if (d < 3) throw DomainError("kappa_estimate: d must be >= 3");
  LimitConstants L;
  L.kind = "kappa";
  L.d = d;
  L.r = 1.0;
  L.expected_direction = "decreasing";
  L.burn_in = 0.0;
  const auto times = doubling_times(opt.t_start, opt.t_max);
  const MassSeries s = mass_series(d, 1.0, times, opt.series);
  fill_estimates(L, times, s, false, opt.tolerance);
  if (opt.refine) {
    const MassSeries f = mass_series(d, 1.0, times, refined(opt.series));
    const auto est = doubling_extrapolation(f.extrapolated);
    L.refinement_residual = std::fabs(est.back() - L.value);
  }
  if (opt.theta_ramp) {
    const double t = times[std::min<size_t>(3, times.size() - 1)];
    const double th = theta_extrapolated_mass(d, 1.0, t, opt.thetas, opt.series.h, opt.series.jobs);
    const auto it = std::find_if(L.diagnostics.begin(), L.diagnostics.end(), [&](auto& p) { return p.t == t; });
    L.theta_residual = std::fabs(th - it->I);
  }
  const double c = paley_zygmund_constant(d);
  if (L.value < c)
    throw InvariantViolation("kappa estimate " + std::to_string(L.value) + " below the lower bound c(d) = " +
                             std::to_string(c));
  return L;
}

LimitConstants a2_estimate(double r, const LimitOptions& opt) {
  if (!(r > 0.0)) throw DomainError("a2_estimate: r must be > 0");
  LimitConstants L;
  L.kind = "A2";
  L.d = 2;
  L.r = r;
  L.expected_direction = "none";
  const std::vector<double> times = {0.25, 0.5, 1.0};
  const MassSeries s = mass_series(2, r, times, opt.series);
  for (size_t i = 0; i < times.size(); ++i) L.diagnostics.push_back({times[i], s.extrapolated[i], s.raw[i], 0.0, true});
  L.value = s.extrapolated.back();
  L.extrapolation_residual = std::fabs(s.extrapolated.back() - s.raw.back());
  L.max_ut = s.max_ut;
  L.converged = true;
  if (opt.refine) {
    const MassSeries f = mass_series(2, r, times, refined(opt.series));
    L.refinement_residual = std::fabs(f.extrapolated.back() - L.value);
  }
  if (opt.theta_ramp) L.theta_residual = std::fabs(theta_extrapolated_mass(2, r, 1.0, opt.thetas, opt.series.h, opt.series.jobs) - L.value);
  return L;
}

LimitConstants d1_mass_limit(double r, const LimitOptions& opt) {
  if (!(r > 0.0)) throw DomainError("d1_mass_limit: r must be > 0");
  LimitConstants L;
  L.kind = "d1_mass_limit";
  L.d = 1;
  L.r = r;
  L.expected_direction = "increasing";
  L.burn_in = opt.burn_in;
  const auto times = doubling_times(opt.t_start, opt.t_max);
  // Ball B(r t) at time t; the grid is scaled with sqrt(t) so every solve is
  // the same discrete problem up to the ball radius r sqrt(t).
  auto run = [&](const SeriesOptions& base) {
    MassSeries all;
    std::vector<MassSeries> parts(times.size());
    parallel_for(times.size(), base.jobs, [&](size_t i) {
      const double t = times[i];
      SeriesOptions o = base;
      o.h = base.h * std::sqrt(t);
      o.t0 = base.t0 * t;
      o.jobs = 1;
      parts[i] = mass_series(1, r * t, {t}, o);
    });
    for (auto& p : parts) {
      all.times.push_back(p.times[0]);
      all.raw.push_back(p.raw[0]);
      all.extrapolated.push_back(p.extrapolated[0]);
      all.poisson_raw.push_back(p.poisson_raw[0]);
      all.max_ut = std::max(all.max_ut, p.max_ut);
    }
    return all;
  };
  const MassSeries s = run(opt.series);
  fill_estimates(L, times, s, true, opt.tolerance);
  if (opt.refine) {
    const MassSeries f = run(refined(opt.series));
    L.refinement_residual = std::fabs(doubling_extrapolation(f.extrapolated).back() - L.value);
  }
  return L;
}

ScalingReport scaling_check(int d, double r, double eps, double t, const SeriesOptions& opt) {
  if (!(eps > 0.0) || !(r > 0.0) || !(t > 0.0)) throw DomainError("scaling_check: r, eps, t must be > 0");
  ScalingReport rep;
  rep.lhs_times = {t / 4.0, t / 2.0, t};
  std::vector<double> rhs_times;
  for (double s : rep.lhs_times) rhs_times.push_back(s / (eps * eps));
  const MassSeries a = mass_series(d, r, rep.lhs_times, opt);
  const MassSeries b = eps == 1.0 ? a : mass_series(d, r / eps, rhs_times, opt);
  const double f = std::pow(eps, d - 2);
  for (size_t i = 0; i < rep.lhs_times.size(); ++i) {
    rep.lhs.push_back(a.extrapolated[i]);
    rep.rhs.push_back(f * b.extrapolated[i]);
    rep.max_relative_error =
        std::max(rep.max_relative_error, std::fabs(rep.lhs[i] - rep.rhs[i]) / std::fabs(rep.lhs[i]));
  }
  return rep;
}

double theta_extrapolated_mass(int d, double r, double t, const std::vector<double>& thetas, double h, unsigned jobs) {
  if (thetas.size() < 2) throw DomainError("theta ramp needs at least two values");
  std::vector<double> I(thetas.size());
  parallel_for(thetas.size(), jobs, [&](size_t k) {
    PdeConfig c;
    c.d = d;
    c.r = r;
    c.t_final = t;
    c.mode = InitialMode::theta;
    c.theta = thetas[k];
    c.h = h;
    c.tolerance = 1e-6;
    c.keep_profiles = false;
    fit_outer_radius(c);
    I[k] = solve_radial(c).mass.back();
  });
  // The error expands in theta^{-1/2}; eliminate the first one or two terms.
  std::vector<double> r1(I.size());
  for (size_t k = 1; k < I.size(); ++k) {
    const double s = std::sqrt(thetas[k] / thetas[k - 1]);
    r1[k] = (s * I[k] - I[k - 1]) / (s - 1.0);
  }
  if (I.size() == 2) return r1[1];
  const size_t n = I.size() - 1;
  const double s = thetas[n] / thetas[n - 1];
  return (s * r1[n] - r1[n - 1]) / (s - 1.0);
}

}  // namespace sbm
