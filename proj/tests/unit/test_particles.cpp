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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"
#include "sbm/moments.hpp"
#include "sbm/particle_system.hpp"
#include "sbm/stats.hpp"

using namespace sbm;

namespace {

SimConfig config(int d, std::uint64_t N, double half_width) {
  SimConfig c;
  c.d = d;
  c.N = N;
  c.window = Box::centered(d, half_width);
  return c;
}

// Generating function of the critical binary process with birth = death rate
// lambda: F(s, t) = (lambda t (1 - s) + s) / (lambda t (1 - s) + 1).
double gf(double s, double lambda, double t) { return (lambda * t * (1 - s) + s) / (lambda * t * (1 - s) + 1); }

}  // namespace

TEST_CASE("Poisson initial condition counts") {
  const auto c = config(1, 100, 5.0);
  RunningStats st;
  for (std::uint64_t k = 0; k < 4000; ++k) {
    Stream s(1, k);
    const auto ps = init_poisson(c, s);
    st.add(static_cast<double>(ps.count()));
    CHECK(ps.unit_mass == doctest::Approx(0.01));
    for (size_t i = 0; i < ps.count(); ++i) CHECK(c.window.contains(ps.position(i)));
  }
  CHECK(std::fabs(st.mean() - 1000.0) < 4 * std::sqrt(1000.0 / 4000));
  CHECK(std::fabs(st.variance() / 1000.0 - 1.0) < 0.1);
}

TEST_CASE("Poisson initial condition passes chi-square against Poisson(800)") {
  const auto c = config(2, 50, 2.0);
  std::vector<std::uint64_t> counts;
  RunningStats st;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    Stream s(2, k);
    counts.push_back(init_poisson(c, s).count());
    st.add(static_cast<double>(counts.back()));
  }
  CHECK(std::fabs(st.mean() - 800.0) < 3 * std::sqrt(800.0 / 10000));
  CHECK(chi_square_poisson(counts, 800.0).p_value > 1e-3);
}

TEST_CASE("zero-volume window gives an empty system") {
  auto c = config(2, 50, 0.0);
  Stream s(3, 0);
  CHECK(init_poisson(c, s).count() == 0);
}

TEST_CASE("expected count above the sizing cap is refused") {
  auto c = config(3, 1000, 50.0);
  Stream s(3, 0);
  CHECK_THROWS_AS(init_poisson(c, s), ResourceError);
}

TEST_CASE("point mass initial condition") {
  auto c = config(3, 1000, 1.0);
  const std::vector<double> x = {0.5, 0.0, -1.0};
  auto ps = init_point_mass(c, x, 1.0);
  CHECK(ps.count() == 1000);
  CHECK(ps.total_mass() == doctest::Approx(1.0));
  CHECK(init_point_mass(c, x, 0.5).count() == 500);
  double rounding = 0.0;
  CHECK(init_point_mass(c, x, 0.0004, &rounding).count() == 0);
  CHECK(rounding == doctest::Approx(0.4));
  CHECK_THROWS_AS(init_point_mass(c, x, 0.0), DomainError);
  CHECK_THROWS_AS(init_point_mass(c, x, -1.0), DomainError);
}

TEST_CASE("advance of an empty system stays empty") {
  ParticleSystem ps;
  ps.d = 2;
  ps.unit_mass = 0.1;
  Stream s(1, 1);
  for (Engine e : {Engine::event_driven, Engine::genealogy}) {
    auto out = advance(ps, 5.0, s, 10, e);
    CHECK(out.count() == 0);
    CHECK(out.time == 5.0);
  }
}

TEST_CASE("advance is reproducible bit for bit") {
  auto c = config(2, 20, 1.0);
  Stream s0(9, 9);
  const auto ps = init_poisson(c, s0);
  for (Engine e : {Engine::event_driven, Engine::genealogy}) {
    Stream a(4, 4), b(4, 4);
    const auto x = advance(ps, 0.7, a, 20, e);
    const auto y = advance(ps, 0.7, b, 20, e);
    CHECK(x.positions == y.positions);
    CHECK(x.peak_population == y.peak_population);
  }
}

TEST_CASE("both engines reproduce the exact finite-N total-mass law") {
  // From n0 = 10 particles with N = 10: P(extinct) = F(0, t)^10 and
  // E[s^{count}] = F(s, t)^10.
  const std::uint64_t N = 10;
  const double t = 0.8;
  auto c = config(1, N, 1.0);
  const std::vector<double> x = {0.0};
  const auto ps = init_point_mass(c, x, 1.0);
  const int R = 20000;
  for (Engine e : {Engine::event_driven, Engine::genealogy}) {
    std::uint64_t extinct = 0;
    RunningStats gen, mass, mass2;
    for (int k = 0; k < R; ++k) {
      Stream s(17, static_cast<std::uint64_t>(k));
      const auto out = advance(ps, t, s, N, e);
      extinct += out.count() == 0;
      gen.add(std::pow(0.5, static_cast<double>(out.count())));
      mass.add(out.total_mass());
      mass2.add(out.total_mass() * out.total_mass());
    }
    const double p0 = std::pow(gf(0.0, N, t), 10.0);
    const double p_hat = static_cast<double>(extinct) / R;
    CHECK(std::fabs(p_hat - p0) < 3.5 * std::sqrt(p0 * (1 - p0) / R));
    CHECK(std::fabs(gen.mean() - std::pow(gf(0.5, N, t), 10.0)) < 4 * gen.std_error());
    CHECK(std::fabs(mass.mean() - 1.0) < 4 * mass.std_error());
    // Var(X_t(1)) = 2 t m for the rate-2N construction.
    CHECK(std::fabs(mass2.mean() - (1.0 + 2.0 * t)) < 4 * mass2.std_error());
  }
}

TEST_CASE("event-driven and genealogy engines agree in space") {
  // Ball mass moments from a point mass against the quadrature moments, with
  // the exact finite-N second-moment excess (m1 - m1^2)/N included.
  const std::uint64_t N = 10;
  const double t = 1.0;
  auto c = config(2, N, 1.0);
  const std::vector<double> x = {0.5, 0.0};
  const auto ps = init_point_mass(c, x, 1.0);
  const BallSpec ball = BallSpec::centered(2, 1.0);
  const double m1 = moment1(t, ball, x);
  const double m2 = moment2(t, ball, x) + (m1 - m1 * m1) / static_cast<double>(N);
  for (Engine e : {Engine::event_driven, Engine::genealogy}) {
    RunningStats a, b;
    for (int k = 0; k < 20000; ++k) {
      Stream s(23, static_cast<std::uint64_t>(k));
      const double v = ball_mass(advance(ps, t, s, N, e), ball);
      a.add(v);
      b.add(v * v);
    }
    CHECK(std::fabs(a.mean() - m1) < 4 * a.std_error());
    CHECK(std::fabs(b.mean() - m2) < 4 * b.std_error());
  }
}

TEST_CASE("population cap sets the overflow flag") {
  // Mass 20 survives to t = 1 with about 20 N particles; 1000 is far below that.
  auto c = config(1, 1000, 1.0);
  const std::vector<double> x = {0.0};
  const auto ps = init_point_mass(c, x, 20.0);
  for (Engine e : {Engine::event_driven, Engine::genealogy}) {
    Stream s(1, 2);
    const auto out = advance(ps, 1.0, s, 1000, e, 1000);
    CHECK(out.overflow);
    CHECK(out.count() <= 1000);
  }
}

TEST_CASE("empty ball radius") {
  ParticleSystem ps;
  ps.d = 2;
  const std::vector<double> o = {0.0, 0.0};
  auto e = empty_ball_radius(ps, o);
  CHECK(std::isinf(e.radius));
  CHECK(e.censored);
  ps.add(std::vector<double>{3.0, 4.0});
  e = empty_ball_radius(ps, o);
  CHECK(e.radius == 5.0);
  CHECK_FALSE(e.censored);

  auto c = config(3, 30, 2.0);
  Stream s(4, 4);
  const auto rnd = init_poisson(c, s);
  const std::vector<double> center = {0.3, -0.2, 0.1};
  double brute = INFINITY;
  for (size_t i = 0; i < rnd.count(); ++i) brute = std::min(brute, distance(rnd.position(i), center));
  CHECK(empty_ball_radius(rnd, center).radius == brute);
}

TEST_CASE("ball mass and its duality with the empty radius") {
  ParticleSystem empty;
  empty.d = 2;
  CHECK(ball_mass(empty, BallSpec::centered(2, 3.0)) == 0.0);
  auto c = config(2, 40, 2.0);
  for (std::uint64_t k = 0; k < 50; ++k) {
    Stream s(5, k);
    const auto ps = init_poisson(c, s);
    CHECK(ball_mass(ps, BallSpec::centered(2, 0.0)) == 0.0);
    const double R = empty_ball_radius(ps, std::vector<double>{0.0, 0.0}).radius;
    for (double r : {0.05, 0.1, 0.2, 0.5}) CHECK((ball_mass(ps, BallSpec::centered(2, r)) > 0.0) == (R < r));
  }
}

TEST_CASE("empty radius is antitone under superposition") {
  const std::vector<double> o = {0.0, 0.0, 0.0};
  for (std::uint64_t k = 0; k < 100; ++k) {
    Stream s(6, k);
    const auto a = init_poisson(config(3, 3, 1.0), s);
    const auto b = init_poisson(config(3, 3, 2.0), s);
    const auto ab = superpose(a, b);
    CHECK(ab.count() == a.count() + b.count());
    CHECK(empty_ball_radius(ab, o).radius <= empty_ball_radius(a, o).radius);
  }
}

TEST_CASE("truncation window") {
  const auto w = truncation_window(1, 20.0, 20.0, 1e-6);
  CHECK(w.half_width > 20.0);
  CHECK(w.certified_bound <= 1e-6);
  CHECK(truncation_bound(1, 20.0, 20.0, w.half_width, 1.0) <= 1e-6);
  CHECK(truncation_bound(1, 20.0, 20.0, 0.99 * w.half_width, 1.0) > 1e-6);
  CHECK(w.box.contains_ball(BallSpec::centered(1, 20.0)));
  // The first-moment bound is sharper than the tail bound on the line:
  // gaussian_hit_tail decays like exp(-g^2/4t), the chi tail like exp(-g^2/2t).
  const double gap = w.half_width - 20.0;
  CHECK(gap > 0.0);
  double prev = INFINITY;
  for (double eps : {1e-9, 1e-6, 1e-3, 0.1}) {
    const double hw = truncation_window(2, 3.0, 4.0, eps).half_width;
    CHECK(hw < prev);
    CHECK(hw > 3.0);
    prev = hw;
  }
  // Denser initial conditions need wider windows.
  CHECK(truncation_window(3, 1.0, 8.0, 1e-6, 100.0).half_width > truncation_window(3, 1.0, 8.0, 1e-6, 1.0).half_width);
}

TEST_CASE("truncation bound dominates the far-field hit rate") {
  // Expected number of time-t particles in B(r) from initial mass outside the
  // box equals the Gaussian mass integral, computed here by Monte Carlo.
  const int d = 2;
  const double r = 1.0, t = 2.0, hw = 4.0;
  Stream s(8, 8);
  const double L = 14.0;
  RunningStats st;
  for (int i = 0; i < 400000; ++i) {
    const double y0 = (2 * s.uniform() - 1) * L, y1 = (2 * s.uniform() - 1) * L;
    if (std::fabs(y0) <= hw && std::fabs(y1) <= hw) {
      st.add(0.0);
      continue;
    }
    const double w0 = y0 + std::sqrt(t) * s.normal(), w1 = y1 + std::sqrt(t) * s.normal();
    st.add(w0 * w0 + w1 * w1 < r * r ? 4 * L * L : 0.0);
  }
  CHECK(st.mean() <= truncation_bound(d, r, t, hw, 1.0));
}
