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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "sbm/config.hpp"
#include "sbm/errors.hpp"
#include "sbm/records.hpp"

using namespace sbm;
namespace fs = std::filesystem;

namespace {

const char* kPlan = R"(# small run
[plan]
d = 2
targets = 1:0.5, 2:0.5
replicas = 100

[sim]
N = 20
seed = 42
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sbmlab_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("canonical form is a fixed point") {
  const Config c = Config::parse(kPlan);
  const std::string canon = c.canonical();
  CHECK(Config::parse(canon).canonical() == canon);
  CHECK(Config::parse(canon).digest() == c.digest());
}

TEST_CASE("digest ignores the seed and nothing else") {
  Config a = Config::parse(kPlan);
  Config b = a;
  b.set("sim", "seed", "43");
  CHECK(a.digest() == b.digest());
  b.set("sim", "N", "21");
  CHECK(a.digest() != b.digest());
  CHECK(a.digest().size() == 16);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    Config::parse("[plan]\nd = 2\nthis line is bad\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  try {
    Config::parse("[plan]\nd = 2\nd = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  const Config c = Config::parse("[plan]\nd = two\n");
  try {
    (void)c.get_int("plan", "d");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.field() == "plan.d");
  }
}

TEST_CASE("plan from config") {
  const ExperimentPlan p = plan_from_config(Config::parse(kPlan));
  CHECK(p.d == 2);
  REQUIRE(p.targets.size() == 2);
  CHECK(p.targets[1].t == 2.0);
  CHECK(p.seed == 42);
  Config no_seed = Config::parse(kPlan);
  no_seed.erase("sim", "seed");
  try {
    (void)plan_from_config(no_seed);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
  Config unknown = Config::parse(kPlan);
  unknown.set("plan", "colour", "blue");
  CHECK_THROWS_AS(plan_from_config(unknown), ConfigError);
}

TEST_CASE("estimate tables round-trip bit-exactly") {
  EstimateTable t;
  t.confidence = 0.95;
  EstimateRow a;
  a.d = 3;
  a.t = 4.0;
  a.r = 1.0 / 3.0;
  a.p_hat = 0.1 + 0.2;
  a.ci_lo = std::nextafter(0.2, 0.0);
  a.ci_hi = 0.4;
  a.n_effective = 1000;
  a.successes = 300;
  a.truncation_bound = 1e-7;
  a.pruned_bound = 3.3e-6;
  t.rows.push_back(a);
  const auto path = scratch("est.csv").string();
  write_estimates(path, "00ff00ff00ff00ff", 99, t);
  const EstimateFile f = read_estimates(path);
  CHECK(f.digest == "00ff00ff00ff00ff");
  CHECK(f.seed == 99);
  REQUIRE(f.table.rows.size() == 1);
  const EstimateRow& b = f.table.rows[0];
  CHECK(b.r == a.r);
  CHECK(b.p_hat == a.p_hat);
  CHECK(b.ci_lo == a.ci_lo);
  CHECK(b.pruned_bound == a.pruned_bound);
  CHECK(b.n_effective == a.n_effective);
}

TEST_CASE("pooling adds Bernoulli counts") {
  EstimateTable x, y;
  EstimateRow r;
  r.t = 1.0;
  r.r = 0.5;
  r.n_effective = 100;
  r.successes = 30;
  r.p_hat = 0.3;
  x.rows.push_back(r);
  r.successes = 50;
  r.p_hat = 0.5;
  y.rows.push_back(r);
  const EstimateTable p = pool_estimates({x, y});
  REQUIRE(p.rows.size() == 1);
  CHECK(p.rows[0].n_effective == 200);
  CHECK(p.rows[0].successes == 80);
  CHECK(p.rows[0].p_hat == doctest::Approx(0.4));
  CHECK(p.rows[0].ci_lo < 0.4);
  y.rows[0].r = 0.6;
  CHECK_THROWS(pool_estimates({x, y}));
}

TEST_CASE("manifest round trip") {
  Manifest m;
  m.tool_version = "0.3.0";
  m.command = "simulate";
  m.config_digest = "0123456789abcdef";
  m.seed = 18446744073709551615ull;
  m.jobs = 4;
  m.wall_clock_seconds = 1.25;
  m.tolerances = {{"epsilon", 1e-6}, {"z_crit", 3.0}};
  m.outputs = {"records.csv", "estimates.csv"};
  const auto path = scratch("manifest.json").string();
  write_manifest(path, m);
  const Manifest n = read_manifest(path);
  CHECK(n.seed == m.seed);
  CHECK(n.config_digest == m.config_digest);
  CHECK(n.tolerances == m.tolerances);
  CHECK(n.outputs == m.outputs);
  CHECK(n.jobs == 4);
}
