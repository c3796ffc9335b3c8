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
#include <optional>
#include <string>
#include <vector>

#include "sbm/geometry.hpp"
#include "sbm/particle_system.hpp"
#include "sbm/stats.hpp"

namespace sbm {

enum class StartMode {
  poisson_start,   // Poisson random measure of unit atoms, each atom N particles
  lebesgue_proxy,  // Poisson(N vol) particles of mass 1/N
  point_mass,      // round(m N) particles at x
};

const char* to_string(StartMode m) noexcept;
StartMode start_mode_from_string(const std::string& s);

struct ReplicaSpec {
  int d = 1;
  std::uint64_t N = 100;
  StartMode mode = StartMode::poisson_start;
  double t = 1.0;
  Box window;                 // initial window for the random starts
  Point x;                    // point-mass location
  double m = 1.0;             // point-mass size
  double ball_radius = 0.0;   // mass inside B(ball_radius) is recorded when > 0
  double search_radius = std::numeric_limits<double>::infinity();
  double prune_delta = 0.0;   // 0 disables pruning
  std::uint64_t population_cap = 10'000'000;
  Engine engine = Engine::genealogy;
};

struct ReplicaResult {
  double radius = std::numeric_limits<double>::infinity();
  bool censored = false;   // no particle alive at t
  bool truncated = false;  // no particle within search_radius; radius holds that lower bound
  double total_mass = 0.0;
  double ball_mass = 0.0;
  std::uint64_t population = 0;
  bool overflow = false;
  double pruned = 0.0;
};

// One replica of the empty-ball observable around the origin.
ReplicaResult run_replica(const ReplicaSpec& spec, Stream s);

struct Target {
  double t = 1.0;
  double r = 0.0;
};

struct ExperimentPlan {
  int d = 1;
  std::vector<Target> targets;
  std::uint64_t replicas = 100;
  std::uint64_t N = 100;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double confidence = 0.95;
  StartMode mode = StartMode::poisson_start;
  Point x;
  double m = 1.0;
  double epsilon = 1e-6;      // truncation budget per target time
  double prune_delta = 0.0;
  bool search_all = false;    // full radius distribution instead of stopping at the largest target
  std::uint64_t population_cap = 10'000'000;
  Engine engine = Engine::genealogy;
  unsigned jobs = 0;

  void validate() const;
};

struct EstimateRow {
  int d = 1;
  double t = 0.0;
  double r = 0.0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  std::uint64_t n_effective = 0;
  std::uint64_t successes = 0;
  std::uint64_t censored_count = 0;
  std::uint64_t cap_hit_count = 0;
  bool unreliable = false;
  double truncation_bound = 0.0;
  double pruned_bound = 0.0;  // mean over replicas
};

struct EstimateTable {
  double confidence = 0.95;
  std::vector<EstimateRow> rows;
  const EstimateRow* find(double t, double r) const;
};

struct ReplicaRecord {
  std::uint64_t replica = 0;
  double t = 0.0;
  ReplicaResult result;
};

struct PlanResult {
  EstimateTable table;
  std::vector<ReplicaRecord> records;  // ordered by (time group, replica)
};

PlanResult run_plan(const ExperimentPlan& plan);

struct Prediction {
  double t = 0.0;
  double r = 0.0;
  double p = 0.0;
  std::string source;  // "closed-form" or "PDE"
  double budget = 0.0;  // declared systematic budget
};

struct ComparisonRow {
  double t = 0.0;
  double r = 0.0;
  double p_pred = 0.0;
  double p_hat = 0.0;
  double sigma = 0.0;
  double z = 0.0;
  double budget = 0.0;
  bool pass = false;
  std::string source;
  std::uint64_t n = 0;
};

struct ComparisonReport {
  double z_crit = 3.0;
  std::vector<ComparisonRow> rows;
  bool all_pass = true;
  std::optional<KsResult> ks;
};

// pass iff |p_hat - p| <= z sqrt(p (1 - p) / n) + budget.
ComparisonReport compare(const EstimateTable& mc, const std::vector<Prediction>& predictions, double z_crit);

struct NTrendRow {
  std::uint64_t N = 0;
  double t = 0.0;
  double r = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
};

struct NTrend {
  std::vector<NTrendRow> rows;
  std::vector<PlanResult> runs;  // one per N, in the given order
  // |p_hat(N_last) - p_hat(N_prev)| for a target.
  double gap(double t, double r) const;
};

NTrend n_trend(const ExperimentPlan& plan, const std::vector<std::uint64_t>& Ns);

struct MomentReport {
  double t = 0.0;
  double r = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t N = 0;
  double m1_quad = 0.0, m2_quad = 0.0;
  double m1_hat = 0.0, m1_se = 0.0;
  double m2_hat = 0.0, m2_se = 0.0;
  double var_hat = 0.0, var_se = 0.0;
  double hit_hat = 0.0, hit_se = 0.0;
  double pz_ratio = 0.0;          // m1^2 / m2
  double finite_n_shift = 0.0;    // (m1 - m1^2)/N, the exact second-moment excess at finite N
  double total_mass_hat = 0.0, total_mass_se = 0.0;
  bool pass_m1 = false, pass_m2 = false, pass_var = false, pass_pz = false;
  bool pass() const noexcept { return pass_m1 && pass_m2 && pass_var && pass_pz; }
};

MomentReport moment_validation(const Point& x, double t, const BallSpec& ball, std::uint64_t replicas,
                               std::uint64_t N, std::uint64_t seed, unsigned jobs = 0, double z_crit = 3.0);

}  // namespace sbm
