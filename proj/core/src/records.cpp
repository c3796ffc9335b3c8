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

#include "sbm/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sbm/errors.hpp"
#include "sbm/stats.hpp"

namespace sbm {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s, const std::string& path, int line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(path, "malformed number '" + s + "'", line);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write '" + path + "'");
  return out;
}

// JSON numbers cannot hold infinities; they are written as strings.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

void parse_digest_line(const std::string& line, const std::string& path, std::string& digest, std::uint64_t& seed) {
  std::istringstream in(line);
  std::string hash, d, s;
  in >> hash >> d >> s;
  if (hash != "#" || d.rfind("digest=", 0) != 0 || s.rfind("seed=", 0) != 0)
    throw ConfigError(path, "missing '# digest=... seed=...' line", 1);
  digest = d.substr(7);
  try {
    seed = std::stoull(s.substr(5));
  } catch (const std::exception&) {
    throw ConfigError(path, "malformed seed", 1);
  }
}

}  // namespace

std::string to_json(const Manifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["jobs"] = m.jobs;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  j["tolerances"] = m.tolerances;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    const json j = json::parse(text);
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.value("command", "");
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.jobs = j.value("jobs", 1u);
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    m.tolerances = j.value("tolerances", std::map<std::string, double>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
  return m;
}

void write_manifest(const std::string& path, const Manifest& m) { open_out(path) << to_json(m); }

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open manifest");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return manifest_from_json(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path, e.what());
  }
}

std::string digest_line(const std::string& digest, std::uint64_t seed) {
  return "# digest=" + digest + " seed=" + std::to_string(seed);
}

void write_replica_records(const std::string& path, const std::string& digest, std::uint64_t seed,
                           const ExperimentPlan& plan, const PlanResult& result) {
  auto out = open_out(path);
  out << digest_line(digest, seed) << "\n";
  out << "replica,t,r,success,radius,censored,truncated,total_mass,population,overflow\n";
  for (const auto& rec : result.records) {
    for (const auto& tg : plan.targets) {
      if (tg.t != rec.t) continue;
      const auto& res = rec.result;
      const bool success = !res.overflow && res.radius >= tg.r;
      out << rec.replica << ',' << num(rec.t) << ',' << num(tg.r) << ',' << success << ',' << num(res.radius) << ','
          << res.censored << ',' << res.truncated << ',' << num(res.total_mass) << ',' << res.population << ','
          << res.overflow << '\n';
    }
  }
}

void write_estimates(const std::string& path, const std::string& digest, std::uint64_t seed,
                     const EstimateTable& table) {
  auto out = open_out(path);
  out << digest_line(digest, seed) << "\n";
  out << "d,t,r,p_hat,ci_lo,ci_hi,n_effective,successes,censored_count,cap_hit_count,unreliable,"
         "truncation_bound,pruned_bound,confidence\n";
  for (const auto& row : table.rows) {
    out << row.d << ',' << num(row.t) << ',' << num(row.r) << ',' << num(row.p_hat) << ',' << num(row.ci_lo) << ','
        << num(row.ci_hi) << ',' << row.n_effective << ',' << row.successes << ',' << row.censored_count << ','
        << row.cap_hit_count << ',' << row.unreliable << ',' << num(row.truncation_bound) << ','
        << num(row.pruned_bound) << ',' << num(table.confidence) << '\n';
  }
}

EstimateFile read_estimates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open estimate table");
  EstimateFile f;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path, "empty file");
  parse_digest_line(line, path, f.digest, f.seed);
  if (!std::getline(in, line) || line.rfind("d,t,r,p_hat", 0) != 0) throw ConfigError(path, "missing header", 2);
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 14) throw ConfigError(path, "expected 14 columns", line_no);
    EstimateRow row;
    row.d = static_cast<int>(parse_num(c[0], path, line_no));
    row.t = parse_num(c[1], path, line_no);
    row.r = parse_num(c[2], path, line_no);
    row.p_hat = parse_num(c[3], path, line_no);
    row.ci_lo = parse_num(c[4], path, line_no);
    row.ci_hi = parse_num(c[5], path, line_no);
    row.n_effective = static_cast<std::uint64_t>(parse_num(c[6], path, line_no));
    row.successes = static_cast<std::uint64_t>(parse_num(c[7], path, line_no));
    row.censored_count = static_cast<std::uint64_t>(parse_num(c[8], path, line_no));
    row.cap_hit_count = static_cast<std::uint64_t>(parse_num(c[9], path, line_no));
    row.unreliable = c[10] == "1";
    row.truncation_bound = parse_num(c[11], path, line_no);
    row.pruned_bound = parse_num(c[12], path, line_no);
    f.table.confidence = parse_num(c[13], path, line_no);
    f.table.rows.push_back(row);
  }
  return f;
}

EstimateTable pool_estimates(const std::vector<EstimateTable>& tables) {
  if (tables.empty()) throw DomainError("pool_estimates: no tables");
  if (tables.size() == 1) return tables.front();
  EstimateTable out = tables.front();
  for (size_t k = 1; k < tables.size(); ++k) {
    const auto& tb = tables[k];
    if (tb.rows.size() != out.rows.size() || tb.confidence != out.confidence)
      throw ConfigError("report", "tables have different targets or confidence");
    for (size_t i = 0; i < out.rows.size(); ++i) {
      auto& a = out.rows[i];
      const auto& b = tb.rows[i];
      if (a.d != b.d || a.t != b.t || a.r != b.r) throw ConfigError("report", "tables have different targets");
      const double wa = static_cast<double>(a.n_effective), wb = static_cast<double>(b.n_effective);
      a.pruned_bound = wa + wb > 0 ? (a.pruned_bound * wa + b.pruned_bound * wb) / (wa + wb) : 0.0;
      a.n_effective += b.n_effective;
      a.successes += b.successes;
      a.censored_count += b.censored_count;
      a.cap_hit_count += b.cap_hit_count;
      a.unreliable = a.unreliable || b.unreliable;
      a.truncation_bound = std::max(a.truncation_bound, b.truncation_bound);
    }
  }
  for (auto& row : out.rows) {
    if (row.n_effective == 0) continue;
    row.p_hat = static_cast<double>(row.successes) / static_cast<double>(row.n_effective);
    const auto iv = wilson_interval(row.successes, row.n_effective, out.confidence);
    row.ci_lo = std::min(iv.lo, row.p_hat);
    row.ci_hi = std::max(iv.hi, row.p_hat);
  }
  return out;
}

void write_profiles(const std::string& path, const std::string& digest, const PdeSolution& sol) {
  auto out = open_out(path);
  out << "# digest=" << digest << "\n";
  out << "t,rho,u\n";
  for (size_t i = 0; i < sol.profiles.size(); ++i)
    for (size_t j = 0; j < sol.grid.size(); ++j)
      out << num(sol.times[i]) << ',' << num(sol.grid[j]) << ',' << num(sol.profiles[i][j]) << '\n';
}

void write_mass_series(const std::string& path, const std::string& digest, const PdeSolution& sol) {
  auto out = open_out(path);
  out << "# digest=" << digest << "\n";
  out << "t,I,poisson_mass,tail\n";
  for (size_t i = 0; i < sol.times.size(); ++i)
    out << num(sol.times[i]) << ',' << num(sol.mass[i]) << ',' << num(sol.poisson_mass[i]) << ',' << num(sol.tail[i])
        << '\n';
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open predictions");
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("t,r,", 0) == 0) continue;
    const auto c = split_csv(line);
    if (c.size() < 3) throw ConfigError(path, "expected t,r,p[,source[,budget]]", line_no);
    Prediction p;
    p.t = parse_num(c[0], path, line_no);
    p.r = parse_num(c[1], path, line_no);
    p.p = parse_num(c[2], path, line_no);
    p.source = c.size() > 3 ? c[3] : "closed-form";
    p.budget = c.size() > 4 ? parse_num(c[4], path, line_no) : 0.0;
    out.push_back(p);
  }
  return out;
}

std::string to_json_line(const LimitConstants& c) {
  json j;
  j["type"] = "limit";
  j["kind"] = c.kind;
  j["d"] = c.d;
  j["r"] = c.r;
  j["value"] = jnum(c.value);
  j["expected_direction"] = c.expected_direction;
  j["monotone"] = c.monotone;
  j["burn_in"] = c.burn_in;
  j["extrapolation_residual"] = jnum(c.extrapolation_residual);
  j["refinement_residual"] = jnum(c.refinement_residual);
  j["theta_residual"] = jnum(c.theta_residual);
  j["certified_tail"] = jnum(c.certified_tail);
  j["converged"] = c.converged;
  j["max_ut"] = c.max_ut;
  json diag = json::array();
  for (const auto& p : c.diagnostics)
    diag.push_back({{"t", p.t}, {"I", p.I}, {"I_raw", p.I_raw}, {"limit", p.limit_estimate}, {"monotone", p.monotone}});
  j["diagnostics"] = diag;
  return j.dump();
}

std::string to_json_line(const ComparisonRow& row, const std::string& label) {
  json j;
  j["type"] = "comparison";
  j["label"] = label;
  j["t"] = row.t;
  j["r"] = row.r;
  j["source"] = row.source;
  j["p_pred"] = row.p_pred;
  j["p_hat"] = row.p_hat;
  j["n"] = row.n;
  j["sigma"] = row.sigma;
  j["z"] = jnum(row.z);
  j["budget"] = row.budget;
  j["pass"] = row.pass;
  return j.dump();
}

std::string to_json_line(const EstimateRow& row) {
  json j;
  j["type"] = "estimate";
  j["d"] = row.d;
  j["t"] = row.t;
  j["r"] = row.r;
  j["p_hat"] = row.p_hat;
  j["ci_lo"] = row.ci_lo;
  j["ci_hi"] = row.ci_hi;
  j["n_effective"] = row.n_effective;
  j["successes"] = row.successes;
  j["censored_count"] = row.censored_count;
  j["cap_hit_count"] = row.cap_hit_count;
  j["unreliable"] = row.unreliable;
  j["truncation_bound"] = row.truncation_bound;
  j["pruned_bound"] = row.pruned_bound;
  return j.dump();
}

std::string to_json_line(const MomentReport& rep) {
  json j;
  j["type"] = "moments";
  j["t"] = rep.t;
  j["r"] = rep.r;
  j["replicas"] = rep.replicas;
  j["N"] = rep.N;
  j["m1_quad"] = rep.m1_quad;
  j["m2_quad"] = rep.m2_quad;
  j["m1_hat"] = rep.m1_hat;
  j["m1_se"] = rep.m1_se;
  j["m2_hat"] = rep.m2_hat;
  j["m2_se"] = rep.m2_se;
  j["var_hat"] = rep.var_hat;
  j["var_se"] = rep.var_se;
  j["hit_hat"] = rep.hit_hat;
  j["hit_se"] = rep.hit_se;
  j["pz_ratio"] = rep.pz_ratio;
  j["finite_n_shift"] = rep.finite_n_shift;
  j["total_mass_hat"] = rep.total_mass_hat;
  j["total_mass_se"] = rep.total_mass_se;
  j["pass_m1"] = rep.pass_m1;
  j["pass_m2"] = rep.pass_m2;
  j["pass_var"] = rep.pass_var;
  j["pass_pz"] = rep.pass_pz;
  return j.dump();
}

std::string to_json_line(const std::string& type, const std::map<std::string, double>& values) {
  json j;
  j["type"] = type;
  for (const auto& [k, v] : values) j[k] = jnum(v);
  return j.dump();
}

}  // namespace sbm
