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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "sbm/config.hpp"
#include "sbm/errors.hpp"
#include "sbm/harness.hpp"
#include "sbm/limits.hpp"
#include "sbm/moments.hpp"
#include "sbm/parallel.hpp"
#include "sbm/recipes.hpp"
#include "sbm/records.hpp"

namespace sbmlab {

namespace fs = std::filesystem;
using sbm::ExitCode;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw sbm::ResourceError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sbm::ResourceError("cannot write '" + path.string() + "'");
  out << text;
}

// The seed flag wins over [sim] seed; one of the two is required.
std::uint64_t resolve_seed(sbm::Config& cfg, const CommonOptions& o) {
  if (o.seed) cfg.set("sim", "seed", std::to_string(*o.seed));
  if (!cfg.has("sim", "seed")) throw sbm::ConfigError("seed", "required field missing (pass --seed or set [sim] seed)");
  return cfg.get_u64("sim", "seed");
}

std::uint64_t require_seed(const CommonOptions& o) {
  if (!o.seed) throw sbm::ConfigError("seed", "required field missing (pass --seed)");
  return *o.seed;
}

sbm::Manifest base_manifest(const std::string& command, const std::string& digest, std::uint64_t seed, unsigned jobs) {
  sbm::Manifest m;
  m.tool_version = SBMLAB_VERSION;
  m.command = command;
  m.config_digest = digest;
  m.seed = seed;
  m.jobs = jobs == 0 ? sbm::default_jobs() : jobs;
  return m;
}

void print_estimates(const sbm::EstimateTable& table) {
  std::cout << std::setw(4) << "d" << std::setw(10) << "t" << std::setw(10) << "r" << std::setw(12) << "p_hat"
            << std::setw(12) << "ci_lo" << std::setw(12) << "ci_hi" << std::setw(10) << "n" << std::setw(10) << "cens"
            << std::setw(8) << "caps" << "\n";
  for (const auto& row : table.rows) {
    std::cout << std::setw(4) << row.d << std::setw(10) << row.t << std::setw(10) << row.r << std::setw(12)
              << std::fixed << std::setprecision(5) << row.p_hat << std::setw(12) << row.ci_lo << std::setw(12)
              << row.ci_hi << std::defaultfloat << std::setw(10) << row.n_effective << std::setw(10)
              << row.censored_count << std::setw(8) << row.cap_hit_count << (row.unreliable ? "  unreliable" : "")
              << "\n";
  }
}

}  // namespace

int cmd_simulate(const CommonOptions& o) {
  Clock clock;
  sbm::Config cfg = sbm::Config::load(o.config);
  cfg.require_sections({"plan", "sim"});
  if (o.tolerance) cfg.set("plan", "epsilon", std::to_string(*o.tolerance));
  const std::uint64_t seed = resolve_seed(cfg, o);
  sbm::ExperimentPlan plan = sbm::plan_from_config(cfg);
  plan.jobs = o.jobs;
  const std::string digest = cfg.digest();
  const fs::path out = prepare_out(o.out);

  const sbm::PlanResult result = sbm::run_plan(plan);
  sbm::write_replica_records((out / "records.csv").string(), digest, seed, plan, result);
  sbm::write_estimates((out / "estimates.csv").string(), digest, seed, result.table);
  write_text(out / "config.txt", cfg.canonical());
  sbm::Manifest m = base_manifest("simulate", digest, seed, o.jobs);
  m.tolerances = {{"confidence", plan.confidence}, {"epsilon", plan.epsilon}, {"prune_delta", plan.prune_delta}};
  m.outputs = {"records.csv", "estimates.csv", "config.txt"};
  m.wall_clock_seconds = clock.seconds();
  sbm::write_manifest((out / "manifest.json").string(), m);

  std::cout << "digest " << digest << "  seed " << seed << "  replicas " << plan.replicas << "\n";
  print_estimates(result.table);
  for (const auto& row : result.table.rows) {
    if (row.unreliable) {
      std::cerr << "population cap hit in " << row.cap_hit_count << " of " << plan.replicas
                << " replicas at t=" << row.t << " (more than 1%)\n";
      return code(ExitCode::resource_abort);
    }
  }
  return code(ExitCode::ok);
}

int cmd_solve(const CommonOptions& o) {
  Clock clock;
  sbm::Config cfg = sbm::Config::load(o.config);
  cfg.require_sections({"pde"});
  if (o.tolerance) cfg.set("pde", "tolerance", std::to_string(*o.tolerance));
  sbm::SolveRequest req = sbm::solve_from_config(cfg);
  req.limit.series.jobs = o.jobs;
  const std::string digest = cfg.digest();
  const fs::path out = prepare_out(o.out);
  sbm::Manifest m = base_manifest("solve", digest, 0, o.jobs);
  std::ofstream summary(out / "summary.jsonl", std::ios::binary);

  if (req.kind == sbm::SolveKind::profile) {
    const sbm::PdeSolution sol = sbm::solve_radial(req.pde);
    sbm::write_profiles((out / "profiles.csv").string(), digest, sol);
    sbm::write_mass_series((out / "series.csv").string(), digest, sol);
    std::map<std::string, double> s = {{"d", sol.d},
                                       {"r", sol.r},
                                       {"Rmax", sol.grid.back()},
                                       {"M", static_cast<double>(sol.grid.size() - 1)},
                                       {"max_ut", sol.max_ut},
                                       {"steps", static_cast<double>(sol.steps)},
                                       {"rejected", static_cast<double>(sol.rejected)},
                                       {"I_final", sol.mass.back()},
                                       {"tail_final", sol.tail.back()},
                                       {"empty_prob_poisson", sbm::empty_prob_poisson(sol, sol.times.back())}};
    if (req.pde.mode == sbm::InitialMode::uniform) s["uniform_error"] = sol.uniform_error;
    summary << sbm::to_json_line("solve", s) << "\n";
    m.outputs = {"profiles.csv", "series.csv", "summary.jsonl"};
    std::cout << "d=" << sol.d << " r=" << sol.r << " M=" << sol.grid.size() - 1 << " Rmax=" << sol.grid.back()
              << " steps=" << sol.steps << "\n";
    for (size_t i = 0; i < sol.times.size(); ++i)
      std::cout << "  t=" << sol.times[i] << "  I=" << std::setprecision(10) << sol.mass[i] << "  tail<=" << sol.tail[i]
                << std::setprecision(6) << "\n";
    std::cout << "max u*t = " << std::setprecision(15) << sol.max_ut << "\n";
    if (req.pde.mode == sbm::InitialMode::uniform)
      std::cout << "uniform self-test: max|u(t) - 1/t| = " << std::scientific << sol.uniform_error << "\n";
  } else {
    sbm::LimitConstants L;
    if (req.kind == sbm::SolveKind::kappa) L = sbm::kappa_estimate(req.pde.d, req.limit);
    else if (req.kind == sbm::SolveKind::a2) L = sbm::a2_estimate(req.r, req.limit);
    else L = sbm::d1_mass_limit(req.r, req.limit);
    summary << sbm::to_json_line(L) << "\n";
    std::ofstream series(out / "series.csv", std::ios::binary);
    series << "# digest=" << digest << "\n" << "t,I,I_raw,limit_estimate,monotone\n" << std::setprecision(17);
    for (const auto& p : L.diagnostics)
      series << p.t << ',' << p.I << ',' << p.I_raw << ',' << p.limit_estimate << ',' << p.monotone << '\n';
    m.outputs = {"series.csv", "summary.jsonl"};
    std::cout << L.kind << " (d=" << L.d << ", r=" << L.r << ") = " << std::setprecision(8) << L.value << "\n";
    for (const auto& p : L.diagnostics)
      std::cout << "  t=" << p.t << "  I=" << p.I << "  limit~" << p.limit_estimate << (p.monotone ? "" : "  (!)")
                << "\n";
    std::cout << "expected direction " << L.expected_direction << (L.monotone ? ", observed" : ", NOT observed")
              << "; extrapolation residual " << L.extrapolation_residual << ", refinement residual "
              << L.refinement_residual << "\n";
  }
  m.tolerances = {{"tolerance", req.pde.tolerance},
                  {"tail_budget", req.pde.tail_budget},
                  {"limit_tolerance", req.limit.tolerance}};
  m.wall_clock_seconds = clock.seconds();
  sbm::write_manifest((out / "manifest.json").string(), m);
  return code(ExitCode::ok);
}

int cmd_verify(const std::string& theorem, const CommonOptions& o) {
  Clock clock;
  const auto& names = sbm::recipe_names();
  if (std::find(names.begin(), names.end(), theorem) == names.end())
    throw sbm::ConfigError("theorem", "unknown name '" + theorem + "' (expected calibration, d1, d2, d3, moments or invariants)");
  sbm::RecipeOptions ro;
  ro.seed = require_seed(o);
  ro.jobs = o.jobs;
  ro.fast = o.fast;
  ro.tolerance = o.tolerance.value_or(0.0);
  ro.log = &std::cerr;
  const fs::path out = prepare_out(o.out);
  const sbm::RecipeResult r = sbm::run_recipe(theorem, ro);
  sbm::print_recipe(std::cout, r);
  std::ostringstream lines;
  for (const auto& rec : r.records) lines << rec << "\n";
  for (const auto& c : r.checks) lines << sbm::to_json_line(c) << "\n";
  write_text(out / ("verify_" + theorem + ".jsonl"), lines.str());
  const std::string digest = sbm::hex64(sbm::fnv1a("verify " + theorem + (o.fast ? " fast" : "")));
  sbm::Manifest m = base_manifest("verify " + theorem, digest, ro.seed, o.jobs);
  m.tolerances = {{"z_crit", sbm::tol::z_crit},
                  {"limit_tolerance", ro.tolerance > 0 ? ro.tolerance : sbm::tol::pde_limit_tolerance},
                  {"truncation_epsilon", sbm::tol::truncation_epsilon}};
  m.outputs = {"verify_" + theorem + ".jsonl"};
  m.wall_clock_seconds = clock.seconds();
  sbm::write_manifest((out / "manifest.json").string(), m);
  if (r.invariant_violation) return code(ExitCode::invariant_violation);
  return r.pass() ? code(ExitCode::ok) : code(ExitCode::verification_failure);
}

int cmd_moments(const CommonOptions& o) {
  Clock clock;
  sbm::Config cfg;
  if (!o.config.empty()) cfg = sbm::Config::load(o.config);
  cfg.require_sections({"moments", "sim"});
  cfg.require_known("moments", {"d", "x", "t", "r", "replicas"});
  cfg.require_known("sim", {"N", "seed"});
  const std::uint64_t seed = resolve_seed(cfg, o);
  const int d = static_cast<int>(cfg.get_int("moments", "d", 3));
  if (d < 1) throw sbm::ConfigError("moments.d", "must be >= 1");
  const auto x = cfg.get_doubles("moments", "x", std::vector<double>(static_cast<size_t>(d), 0.0));
  if (static_cast<int>(x.size()) != d) throw sbm::ConfigError("moments.x", "needs d coordinates");
  const double t = cfg.get_double("moments", "t", 1.0);
  const double r = cfg.get_double("moments", "r", 1.0);
  if (!(t > 0.0)) throw sbm::ConfigError("moments.t", "must be > 0");
  if (!(r >= 0.0)) throw sbm::ConfigError("moments.r", "must be >= 0");
  const std::uint64_t replicas = cfg.get_u64("moments", "replicas", o.fast ? 2000 : 10000);
  const std::uint64_t N = cfg.get_u64("sim", "N", 1000);
  const double z = o.tolerance.value_or(sbm::tol::z_crit);
  const sbm::MomentReport rep =
      sbm::moment_validation(x, t, sbm::BallSpec::centered(d, r), replicas, N, seed, o.jobs, z);
  const fs::path out = prepare_out(o.out);
  write_text(out / "moments.jsonl", sbm::to_json_line(rep) + "\n");
  sbm::Manifest m = base_manifest("moments", cfg.digest(), seed, o.jobs);
  m.tolerances = {{"z_crit", z}};
  m.outputs = {"moments.jsonl"};
  m.wall_clock_seconds = clock.seconds();
  sbm::write_manifest((out / "manifest.json").string(), m);
  std::cout << std::setprecision(6) << "moment1 " << rep.m1_quad << "  empirical " << rep.m1_hat << " +- " << rep.m1_se
            << (rep.pass_m1 ? "  ok" : "  FAIL") << "\n"
            << "moment2 " << rep.m2_quad << "  empirical " << rep.m2_hat << " +- " << rep.m2_se
            << (rep.pass_m2 ? "  ok" : "  FAIL") << "\n"
            << "variance " << rep.m2_quad - rep.m1_quad * rep.m1_quad << "  empirical " << rep.var_hat << " +- "
            << rep.var_se << (rep.pass_var ? "  ok" : "  FAIL") << "\n"
            << "m1^2/m2 " << rep.pz_ratio << "  hit probability " << rep.hit_hat << " +- " << rep.hit_se
            << (rep.pass_pz ? "  ok" : "  FAIL") << "\n";
  return rep.pass() ? code(ExitCode::ok) : code(ExitCode::verification_failure);
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& predictions, const CommonOptions& o) {
  struct Input {
    std::string dir;
    sbm::Manifest manifest;
    sbm::EstimateFile table;
  };
  std::vector<Input> in;
  for (const auto& dir : inputs) {
    Input x;
    x.dir = dir;
    x.manifest = sbm::read_manifest((fs::path(dir) / "manifest.json").string());
    x.table = sbm::read_estimates((fs::path(dir) / "estimates.csv").string());
    if (x.manifest.config_digest != x.table.digest)
      throw sbm::ConfigError(dir, "manifest digest " + x.manifest.config_digest + " does not match its table (" +
                                      x.table.digest + ")");
    in.push_back(std::move(x));
  }
  std::set<std::uint64_t> seeds;
  for (const auto& x : in) {
    const auto& first = in.front();
    if (x.manifest.config_digest != first.manifest.config_digest)
      throw sbm::ConfigError("report", "digest mismatch: " + first.dir + " (" + first.manifest.config_digest + ") vs " +
                                           x.dir + " (" + x.manifest.config_digest + "); refusing to mix runs");
    if (x.manifest.tolerances != first.manifest.tolerances)
      throw sbm::ConfigError("report", "conflicting tolerances between " + (fs::path(first.dir) / "manifest.json").string() +
                                           " and " + (fs::path(x.dir) / "manifest.json").string());
    if (!seeds.insert(x.manifest.seed).second)
      throw sbm::ConfigError("report", "seed " + std::to_string(x.manifest.seed) + " appears twice; pooling would reuse samples");
  }
  std::vector<sbm::EstimateTable> tables;
  for (const auto& x : in) tables.push_back(x.table.table);
  const sbm::EstimateTable pooled = sbm::pool_estimates(tables);

  const fs::path out = prepare_out(o.out);
  const std::string digest = in.front().manifest.config_digest;
  sbm::write_estimates((out / "report.csv").string(), digest, in.size() == 1 ? in.front().manifest.seed : 0, pooled);
  std::ostringstream md;
  md << "# Empty-ball report\n\nconfig digest `" << digest << "`, " << in.size() << " run(s), seeds";
  for (const auto& x : in) md << ' ' << x.manifest.seed;
  md << "\n\n| d | t | r | p_hat | ci_lo | ci_hi | n | censored | cap hits |\n|---|---|---|---|---|---|---|---|---|\n";
  md << std::setprecision(6);
  for (const auto& row : pooled.rows)
    md << "| " << row.d << " | " << row.t << " | " << row.r << " | " << row.p_hat << " | " << row.ci_lo << " | "
       << row.ci_hi << " | " << row.n_effective << " | " << row.censored_count << " | " << row.cap_hit_count << " |\n";
  int rc = code(ExitCode::ok);
  if (!predictions.empty()) {
    const auto preds = sbm::read_predictions(predictions);
    const sbm::ComparisonReport cmp = sbm::compare(pooled, preds, o.tolerance.value_or(sbm::tol::z_crit));
    md << "\n| t | r | source | predicted | p_hat | z | budget | result |\n|---|---|---|---|---|---|---|---|\n";
    std::ofstream jl(out / "comparison.jsonl", std::ios::binary);
    for (const auto& c : cmp.rows) {
      md << "| " << c.t << " | " << c.r << " | " << c.source << " | " << c.p_pred << " | " << c.p_hat << " | " << c.z
         << " | " << c.budget << " | " << (c.pass ? "pass" : "FAIL") << " |\n";
      jl << sbm::to_json_line(c, "report") << "\n";
    }
    if (!cmp.all_pass) rc = code(ExitCode::verification_failure);
  }
  write_text(out / "report.md", md.str());
  std::cout << md.str();
  return rc;
}

}  // namespace sbmlab
