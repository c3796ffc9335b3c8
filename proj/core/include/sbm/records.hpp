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
#include <map>
#include <string>
#include <vector>

#include "sbm/harness.hpp"
#include "sbm/limits.hpp"
#include "sbm/pde.hpp"

namespace sbm {

// Output tables are comma-separated with a header row, preceded by a single
// line "# digest=<hex> seed=<u64>". Doubles are written with 17 significant
// digits so tables re-read bit-exactly.

struct Manifest {
  std::string tool_version;
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  double wall_clock_seconds = 0.0;
  std::map<std::string, double> tolerances;
  std::vector<std::string> outputs;
};

std::string to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

std::string digest_line(const std::string& digest, std::uint64_t seed);

// One row per (replica, t, r).
void write_replica_records(const std::string& path, const std::string& digest, std::uint64_t seed,
                           const ExperimentPlan& plan, const PlanResult& result);
void write_estimates(const std::string& path, const std::string& digest, std::uint64_t seed,
                     const EstimateTable& table);

struct EstimateFile {
  std::string digest;
  std::uint64_t seed = 0;
  EstimateTable table;
};
EstimateFile read_estimates(const std::string& path);

// Bernoulli pooling of tables with identical targets.
EstimateTable pool_estimates(const std::vector<EstimateTable>& tables);

// Columnar dumps of a solve: (t, rho, u) and (t, I, poisson mass, tail).
void write_profiles(const std::string& path, const std::string& digest, const PdeSolution& sol);
void write_mass_series(const std::string& path, const std::string& digest, const PdeSolution& sol);

// Prediction files: t,r,p,source,budget.
std::vector<Prediction> read_predictions(const std::string& path);

// Single-line JSON objects for summary streams.
std::string to_json_line(const LimitConstants& c);
std::string to_json_line(const ComparisonRow& row, const std::string& label);
std::string to_json_line(const EstimateRow& row);
std::string to_json_line(const MomentReport& rep);
std::string to_json_line(const std::string& type, const std::map<std::string, double>& values);

}  // namespace sbm
