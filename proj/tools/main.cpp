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

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sbm/errors.hpp"

namespace {

int code(sbm::ExitCode c) { return static_cast<int>(c); }

void add_common(CLI::App* app, sbmlab::CommonOptions& o, bool with_config) {
  if (with_config) app->add_option("--config", o.config, "Configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Master seed (required for anything random)");
  app->add_option("--jobs", o.jobs, "Worker threads; 0 uses all available cores");
  app->add_option("--out", o.out, "Output directory");
  app->add_flag("--fast", o.fast, "Reduced replica counts and horizons");
  app->add_option("--tolerance", o.tolerance, "Override of the command's main numerical tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empty-ball laboratory for critical super-Brownian motion"};
  app.set_version_flag("--version", SBMLAB_VERSION);
  app.require_subcommand(1);

  sbmlab::CommonOptions sim_o, solve_o, verify_o, moments_o, report_o;
  std::string theorem;
  std::vector<std::string> inputs;
  std::string predictions;

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo plan and write replica records");
  add_common(sim, sim_o, true);
  sim->get_option("--config")->required();
  auto* solve = app.add_subcommand("solve", "Solve the radial PDE or compute a limit constant");
  add_common(solve, solve_o, true);
  solve->get_option("--config")->required();
  auto* verify = app.add_subcommand("verify", "Run a verification recipe end to end");
  verify->add_option("theorem", theorem, "calibration, d1, d2, d3, moments or invariants")->required();
  add_common(verify, verify_o, false);
  auto* moments = app.add_subcommand("moments", "Compare simulated ball-mass moments with quadrature");
  add_common(moments, moments_o, true);
  auto* report = app.add_subcommand("report", "Merge simulate outputs into one comparison document");
  report->add_option("inputs", inputs, "Output directories of simulate runs")->required();
  report->add_option("--predictions", predictions, "CSV of t,r,p[,source[,budget]]")->check(CLI::ExistingFile);
  add_common(report, report_o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(sbm::ExitCode::config_error);
  }

  try {
    if (*sim) return sbmlab::cmd_simulate(sim_o);
    if (*solve) return sbmlab::cmd_solve(solve_o);
    if (*verify) return sbmlab::cmd_verify(theorem, verify_o);
    if (*moments) return sbmlab::cmd_moments(moments_o);
    if (*report) return sbmlab::cmd_report(inputs, predictions, report_o);
  } catch (const sbm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return code(sbm::ExitCode::config_error);
  } catch (const sbm::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return code(sbm::ExitCode::config_error);
  } catch (const sbm::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return code(sbm::ExitCode::resource_abort);
  } catch (const sbm::DomainTooSmall& e) {
    std::cerr << "enlarge the domain: " << e.what() << "\n";
    return code(sbm::ExitCode::resource_abort);
  } catch (const sbm::InvariantViolation& e) {
    std::cerr << "invariant violated (exact bound u(t,x) <= 1/t): " << e.what() << "\n";
    return code(sbm::ExitCode::invariant_violation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(sbm::ExitCode::resource_abort);
  }
  return code(sbm::ExitCode::config_error);
}
