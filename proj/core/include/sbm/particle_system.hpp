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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sbm/geometry.hpp"
#include "sbm/rng.hpp"

namespace sbm {

// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  static Box centered(int d, double half_width);
  int dim() const noexcept { return static_cast<int>(lo.size()); }
  double volume() const noexcept;
  bool contains(std::span<const double> x) const noexcept;
  bool contains_ball(const BallSpec& b) const noexcept;
};

struct SimConfig {
  int d = 1;
  std::uint64_t N = 100;  // particles per unit mass
  Box window;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t population_cap = 10'000'000;
  double max_expected_count = 1e8;

  void validate() const;
  Stream stream() const { return Stream(seed, stream_id); }
  double unit_mass() const noexcept { return 1.0 / static_cast<double>(N); }
};

struct ParticleSystem {
  int d = 1;
  double time = 0.0;
  double unit_mass = 1.0;
  std::vector<double> positions;  // d coordinates per particle
  std::uint64_t peak_population = 0;
  bool overflow = false;

  std::size_t count() const noexcept { return positions.size() / static_cast<std::size_t>(d); }
  double total_mass() const noexcept { return unit_mass * static_cast<double>(count()); }
  std::span<const double> position(std::size_t i) const noexcept {
    return {positions.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
  void add(std::span<const double> x);
};

struct EmptyBallSample {
  double t = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  bool censored = true;
  std::uint64_t replica_id = 0;
  std::string config_digest;
};

enum class Engine { event_driven, genealogy };

// Count ~ Poisson(N vol(window)), i.i.d. uniform positions, mass 1/N each.
ParticleSystem init_poisson(const SimConfig& config, Stream& s);
// Poisson random measure of unit intensity: every atom is a unit mass made of N particles.
ParticleSystem init_prm(const SimConfig& config, Stream& s);
// round(m N) particles at x. The rounding error (m N - count) is stored in `rounding` when given.
ParticleSystem init_point_mass(const SimConfig& config, std::span<const double> x, double m,
                               double* rounding = nullptr);
ParticleSystem superpose(const ParticleSystem& a, const ParticleSystem& b);

// Runs the system to t_target. Each particle branches at rate 2N and then dies
// or splits in two with probability 1/2. Both engines are exact in law; the
// event-driven one walks every branching event while the genealogy one only
// samples the reduced tree of the survivors.
ParticleSystem advance(const ParticleSystem& ps, double t_target, Stream& s, std::uint64_t N,
                       Engine engine = Engine::genealogy, std::uint64_t population_cap = 10'000'000);

EmptyBallSample empty_ball_radius(const ParticleSystem& ps, std::span<const double> center);
double ball_mass(const ParticleSystem& ps, const BallSpec& ball);

struct TruncationWindow {
  Box box;
  double half_width = 0.0;
  double certified_bound = 0.0;  // upper bound on P(ball hit by mass started outside the box)
};

// Smallest centered cube such that the expected number of time-t particles in
// B(r_target) descending from initial particles outside it is at most epsilon.
// `particle_density` is the initial number of particles per unit volume.
TruncationWindow truncation_window(int d, double r_target, double t, double epsilon,
                                   double particle_density = 1.0);
double truncation_bound(int d, double r_target, double t, double half_width, double particle_density);

}  // namespace sbm
