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

#include "sbm/particle_system.hpp"

#include <algorithm>
#include <cmath>

#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"
#include "sbm/genealogy.hpp"

namespace sbm {

Box Box::centered(int d, double half_width) {
  Box b;
  b.lo.assign(static_cast<size_t>(d), -half_width);
  b.hi.assign(static_cast<size_t>(d), half_width);
  return b;
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (size_t i = 0; i < lo.size(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

bool Box::contains(std::span<const double> x) const noexcept {
  for (size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

bool Box::contains_ball(const BallSpec& b) const noexcept {
  for (size_t i = 0; i < lo.size(); ++i)
    if (b.center[i] - b.radius < lo[i] || b.center[i] + b.radius > hi[i]) return false;
  return true;
}

void SimConfig::validate() const {
  if (d < 1) throw DomainError("SimConfig: d must be >= 1");
  if (N < 1) throw DomainError("SimConfig: N must be >= 1");
  if (window.dim() != d || window.hi.size() != window.lo.size())
    throw DomainError("SimConfig: window dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (!(window.hi[static_cast<size_t>(i)] >= window.lo[static_cast<size_t>(i)]))
      throw DomainError("SimConfig: window is empty");
  if (!(horizon > 0.0)) throw DomainError("SimConfig: horizon must be > 0");
}

void ParticleSystem::add(std::span<const double> x) { positions.insert(positions.end(), x.begin(), x.end()); }

namespace {

void uniform_in(const Box& box, Stream& s, std::vector<double>& out) {
  for (size_t i = 0; i < box.lo.size(); ++i) out.push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * s.uniform());
}

ParticleSystem empty_like(const SimConfig& c) {
  ParticleSystem ps;
  ps.d = c.d;
  ps.unit_mass = c.unit_mass();
  return ps;
}

void check_expected(const SimConfig& c, double expected) {
  if (expected > c.max_expected_count)
    throw ResourceError("initial population of " + std::to_string(expected) + " exceeds the sizing cap " +
                        std::to_string(c.max_expected_count));
}

void advance_event_driven(const ParticleSystem& ps, double t_target, Stream& s, std::uint64_t N,
                          ParticleSystem& out, std::uint64_t cap) {
  const size_t d = static_cast<size_t>(ps.d);
  const double rate = 2.0 * static_cast<double>(N);
  struct Item {
    double time;
    Stream stream;
    std::vector<double> x;
  };
  std::vector<Item> stack;
  for (size_t i = 0; i < ps.count(); ++i) {
    auto p = ps.position(i);
    stack.push_back({ps.time, s.child(i), std::vector<double>(p.begin(), p.end())});
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      for (;;) {
        const double dt = it.stream.exponential(rate);
        const double step = std::min(dt, t_target - it.time);
        const double sd = std::sqrt(step);
        for (size_t k = 0; k < d; ++k) it.x[k] += sd * it.stream.normal();
        if (it.time + dt >= t_target) {
          if (out.count() >= cap) {
            out.overflow = true;
            return;
          }
          out.add(it.x);
          break;
        }
        it.time += dt;
        if (it.stream.uniform() < 0.5) break;  // death
        stack.push_back({it.time, it.stream.child(1), it.x});
        it.stream = it.stream.child(0);
      }
    }
  }
}

void advance_genealogy(const ParticleSystem& ps, double t_target, Stream& s, std::uint64_t N,
                       ParticleSystem& out, std::uint64_t cap) {
  const double tau = t_target - ps.time;
  const FamilySampler fam(ps.d, static_cast<double>(N));
  const double p = fam.survival(tau);
  const std::uint64_t n = ps.count();
  // Visit only the surviving particles by geometric skipping.
  std::uint64_t idx = 0;
  for (;;) {
    const std::uint64_t g = s.geometric(p);
    if (g > n - idx) break;
    idx += g;
    const std::uint64_t i = idx - 1;
    Stream fs = s.child(i);
    const std::uint64_t leaves = fam.leaf_count(tau, fs);
    if (out.count() + leaves > cap) {
      out.overflow = true;
      return;
    }
    fam.place(ps.position(i), tau, leaves, fs, out.positions);
  }
}

}  // namespace

ParticleSystem init_poisson(const SimConfig& c, Stream& s) {
  c.validate();
  ParticleSystem ps = empty_like(c);
  const double mean = static_cast<double>(c.N) * c.window.volume();
  check_expected(c, mean);
  const std::uint64_t n = s.poisson(mean);
  ps.positions.reserve(n * static_cast<size_t>(c.d));
  for (std::uint64_t i = 0; i < n; ++i) uniform_in(c.window, s, ps.positions);
  ps.peak_population = n;
  return ps;
}

ParticleSystem init_prm(const SimConfig& c, Stream& s) {
  c.validate();
  ParticleSystem ps = empty_like(c);
  const double mean = c.window.volume();
  check_expected(c, mean * static_cast<double>(c.N));
  const std::uint64_t atoms = s.poisson(mean);
  std::vector<double> x;
  for (std::uint64_t a = 0; a < atoms; ++a) {
    x.clear();
    uniform_in(c.window, s, x);
    for (std::uint64_t k = 0; k < c.N; ++k) ps.add(x);
  }
  ps.peak_population = ps.count();
  return ps;
}

ParticleSystem init_point_mass(const SimConfig& c, std::span<const double> x, double m, double* rounding) {
  if (!(m > 0.0)) throw DomainError("init_point_mass: m must be > 0");
  if (static_cast<int>(x.size()) != c.d) throw DomainError("init_point_mass: point dimension mismatch");
  ParticleSystem ps = empty_like(c);
  const double target = m * static_cast<double>(c.N);
  check_expected(c, target);
  const auto n = static_cast<std::uint64_t>(std::llround(target));
  if (rounding) *rounding = target - static_cast<double>(n);
  ps.positions.reserve(n * x.size());
  for (std::uint64_t i = 0; i < n; ++i) ps.add(x);
  ps.peak_population = n;
  return ps;
}

ParticleSystem superpose(const ParticleSystem& a, const ParticleSystem& b) {
  if (a.d != b.d || a.unit_mass != b.unit_mass || a.time != b.time)
    throw DomainError("superpose: incompatible systems");
  ParticleSystem r = a;
  r.positions.insert(r.positions.end(), b.positions.begin(), b.positions.end());
  r.peak_population = std::max(r.peak_population, r.count());
  r.overflow = a.overflow || b.overflow;
  return r;
}

ParticleSystem advance(const ParticleSystem& ps, double t_target, Stream& s, std::uint64_t N, Engine engine,
                       std::uint64_t population_cap) {
  if (!(t_target >= ps.time)) throw DomainError("advance: t_target precedes the system time");
  if (N < 1) throw DomainError("advance: N must be >= 1");
  ParticleSystem out;
  out.d = ps.d;
  out.unit_mass = ps.unit_mass;
  out.time = t_target;
  out.overflow = ps.overflow;
  if (t_target == ps.time) return ps;
  if (engine == Engine::event_driven)
    advance_event_driven(ps, t_target, s, N, out, population_cap);
  else
    advance_genealogy(ps, t_target, s, N, out, population_cap);
  out.peak_population = std::max(ps.peak_population, static_cast<std::uint64_t>(out.count()));
  return out;
}

EmptyBallSample empty_ball_radius(const ParticleSystem& ps, std::span<const double> center) {
  EmptyBallSample e;
  e.t = ps.time;
  for (size_t i = 0; i < ps.count(); ++i) e.radius = std::min(e.radius, distance(ps.position(i), center));
  e.censored = ps.count() == 0;
  return e;
}

double ball_mass(const ParticleSystem& ps, const BallSpec& ball) {
  std::size_t inside = 0;
  for (size_t i = 0; i < ps.count(); ++i)
    if (distance(ps.position(i), ball.center) < ball.radius) ++inside;
  return ps.unit_mass * static_cast<double>(inside);
}

double truncation_bound(int d, double r_target, double t, double half_width, double particle_density) {
  // Points outside the cube are at distance >= half_width from the center,
  // and a path from there must cover half_width - r_target to reach the ball.
  const double gap = half_width - r_target;
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return particle_density * ball_volume(d, r_target) * radial_gaussian_tail(d, gap, t);
}

TruncationWindow truncation_window(int d, double r_target, double t, double epsilon, double particle_density) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("truncation_window: epsilon must be in (0,1)");
  if (!(t > 0.0)) throw DomainError("truncation_window: t must be > 0");
  if (!(r_target >= 0.0)) throw DomainError("truncation_window: r_target must be >= 0");
  const double margin = 1e-9 + 1e-9 * r_target;
  double lo = r_target + margin;
  double hi = r_target + std::sqrt(t) + 1.0;
  while (truncation_bound(d, r_target, t, hi, particle_density) > epsilon) hi = r_target + 2.0 * (hi - r_target);
  if (truncation_bound(d, r_target, t, lo, particle_density) <= epsilon) hi = lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (truncation_bound(d, r_target, t, mid, particle_density) > epsilon)
      lo = mid;
    else
      hi = mid;
  }
  TruncationWindow w;
  w.half_width = hi;
  w.box = Box::centered(d, hi);
  w.certified_bound = truncation_bound(d, r_target, t, hi, particle_density);
  return w;
}

}  // namespace sbm
