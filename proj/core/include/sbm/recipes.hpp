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
#include <ostream>
#include <string>
#include <vector>

namespace sbm {

// Pinned tolerances of the verification recipes. The command-line tool and the
// acceptance tests read the same values.
namespace tol {
inline constexpr double z_crit = 3.0;                 // MC decision rule, in standard errors
inline constexpr double martingale_z = 4.0;           // mean-mass martingale
inline constexpr double drift_z = 2.0;                // t-stabilization of MC estimates
inline constexpr double d1_limit_rel = 0.02;          // final d=1 mass limit vs 2r
inline constexpr double scaling_rel = 0.01;           // d=2 scaling identity
inline constexpr double a2_ratio_lo = 0.85;           // A2(6)/(36 pi)
inline constexpr double a2_ratio_hi = 1.25;
inline constexpr double kappa_stability_rel = 5e-4;   // three significant digits
inline constexpr double ut_bound_slack = 1e-12;       // u t <= 1 + slack
inline constexpr double uniform_exactness = 1e-12;    // |u - 1/t| in uniform mode
inline constexpr double coverage_lo = 0.94;
inline constexpr double coverage_hi = 0.96;
inline constexpr double ks_alpha = 0.05;              // base of the KS envelope
inline constexpr double truncation_epsilon = 1e-6;
inline constexpr double prune_delta_d3 = 1e-8;
inline constexpr double pde_limit_tolerance = 5e-4;   // t-doubling stop rule
}  // namespace tol

struct RecipeOptions {
  std::uint64_t seed = 20261018;
  unsigned jobs = 0;
  bool fast = false;         // fewer replicas and shorter t-doubling runs
  double tolerance = 0.0;    // overrides tol::pde_limit_tolerance when > 0
  std::ostream* log = nullptr;
};

struct Check {
  std::string name;
  bool pass = false;
  bool informational = false;  // reported, never gates the recipe
  std::string detail;
};

struct RecipeResult {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> records;  // one JSON object per line
  double seconds = 0.0;
  bool invariant_violation = false;  // an exact bound failed numerically

  bool pass() const noexcept;
  const Check* find(const std::string& name) const noexcept;
};

RecipeResult verify_calibration(const RecipeOptions& opt);
RecipeResult verify_d1(const RecipeOptions& opt);
RecipeResult verify_d2(const RecipeOptions& opt);
RecipeResult verify_d3(const RecipeOptions& opt);
RecipeResult verify_moments(const RecipeOptions& opt);
RecipeResult verify_invariants(const RecipeOptions& opt);

// Names accepted by run_recipe: calibration, d1, d2, d3, moments, invariants.
const std::vector<std::string>& recipe_names();
// Throws ConfigError for an unknown name.
RecipeResult run_recipe(const std::string& name, const RecipeOptions& opt);

std::string to_json_line(const Check& c);

void print_recipe(std::ostream& out, const RecipeResult& r);

}  // namespace sbm
