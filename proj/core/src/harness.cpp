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

#include "sbm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sbm/errors.hpp"
#include "sbm/genealogy.hpp"
#include "sbm/moments.hpp"
#include "sbm/parallel.hpp"

namespace sbm {

const char* to_string(StartMode m) noexcept {
  switch (m) {
    case StartMode::poisson_start: return "poisson_start";
    case StartMode::lebesgue_proxy: return "lebesgue_proxy";
    case StartMode::point_mass: return "point_mass";
  }
  return "?";
}

StartMode start_mode_from_string(const std::string& s) {
  if (s == "poisson_start") return StartMode::poisson_start;
  if (s == "lebesgue_proxy") return StartMode::lebesgue_proxy;
  if (s == "point_mass") return StartMode::point_mass;
  throw ConfigError("mode", "unknown start mode '" + s + "'");
}

namespace {

struct Family {
  double dist;
  std::uint64_t index;
  std::uint64_t leaves;
  std::vector<double> y;
};

void uniform_point(const Box& box, Stream& s, std::vector<double>& y) {
  y.resize(box.lo.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * s.uniform();
}

void finish_radius(const ReplicaSpec& spec, ReplicaResult& r, double nearest) {
  if (r.population == 0) {
    r.censored = true;
    r.radius = std::numeric_limits<double>::infinity();
  } else if (!(nearest < spec.search_radius)) {
    r.truncated = true;
    r.radius = spec.search_radius;
  } else {
    r.radius = nearest;
  }
}

// Materialized path, used for the event-driven engine.
ReplicaResult replica_materialized(const ReplicaSpec& spec, Stream& s) {
  SimConfig c;
  c.d = spec.d;
  c.N = spec.N;
  c.window = spec.mode == StartMode::point_mass ? Box::centered(spec.d, 0.0) : spec.window;
  c.horizon = spec.t;
  c.population_cap = spec.population_cap;
  ParticleSystem ps = spec.mode == StartMode::point_mass ? init_point_mass(c, spec.x, spec.m)
                      : spec.mode == StartMode::poisson_start ? init_prm(c, s)
                                                               : init_poisson(c, s);
  Stream adv = s.child(0xADu);
  ParticleSystem out = advance(ps, spec.t, adv, spec.N, spec.engine, spec.population_cap);
  ReplicaResult r;
  r.overflow = out.overflow;
  r.population = out.count();
  r.total_mass = out.total_mass();
  double nearest = std::numeric_limits<double>::infinity();
  std::size_t inside = 0;
  for (size_t i = 0; i < out.count(); ++i) {
    const double dist = norm(out.position(i));
    nearest = std::min(nearest, dist);
    if (dist < spec.ball_radius) ++inside;
  }
  r.ball_mass = static_cast<double>(inside) / static_cast<double>(spec.N);
  finish_radius(spec, r, nearest);
  return r;
}

}  // namespace

ReplicaResult run_replica(const ReplicaSpec& spec, Stream s) {
  if (spec.engine == Engine::event_driven) return replica_materialized(spec, s);
  const FamilySampler fam(spec.d, static_cast<double>(spec.N));
  const double p = fam.survival(spec.t);
  const double unit = 1.0 / static_cast<double>(spec.N);
  ReplicaResult r;
  std::vector<Family> families;
  std::uint64_t next_index = 0;
  auto add_family = [&](const std::vector<double>& y) {
    Stream fs = s.child(next_index);
    const std::uint64_t leaves = fam.leaf_count(spec.t, fs);
    families.push_back({norm(y), next_index, leaves, y});
    ++next_index;
    r.population += leaves;
  };
  std::vector<double> y;
  switch (spec.mode) {
    case StartMode::point_mass: {
      const auto n0 = static_cast<std::uint64_t>(std::llround(spec.m * static_cast<double>(spec.N)));
      const std::uint64_t k = s.binomial(n0, p);
      y.assign(spec.x.begin(), spec.x.end());
      for (std::uint64_t i = 0; i < k; ++i) add_family(y);
      break;
    }
    case StartMode::lebesgue_proxy: {
      const std::uint64_t k = s.poisson(static_cast<double>(spec.N) * spec.window.volume() * p);
      for (std::uint64_t i = 0; i < k; ++i) {
        uniform_point(spec.window, s, y);
        add_family(y);
      }
      break;
    }
    case StartMode::poisson_start: {
      // Atoms carrying at least one surviving family, by thinning.
      const double lp = std::log1p(-p);
      const double q = -std::expm1(static_cast<double>(spec.N) * lp);
      const std::uint64_t atoms = s.poisson(spec.window.volume() * q);
      for (std::uint64_t a = 0; a < atoms; ++a) {
        uniform_point(spec.window, s, y);
        // First survivor index conditioned on being <= N, then the rest.
        double j = std::ceil(std::log1p(-s.uniform() * q) / lp);
        j = std::clamp(j, 1.0, static_cast<double>(spec.N));
        const std::uint64_t rest = s.binomial(spec.N - static_cast<std::uint64_t>(j), p);
        for (std::uint64_t i = 0; i <= rest; ++i) add_family(y);
      }
      break;
    }
  }
  if (r.population > spec.population_cap) {
    r.overflow = true;
    return r;
  }
  r.total_mass = unit * static_cast<double>(r.population);
  double nearest = std::numeric_limits<double>::infinity();
  if (spec.ball_radius > 0.0 || spec.mode == StartMode::point_mass) {
    // Full placement; needed for exact ball counts.
    std::vector<double> leaves;
    std::uint64_t inside = 0;
    for (const auto& f : families) {
      leaves.clear();
      Stream fs = s.child(f.index);
      fam.leaf_count(spec.t, fs);  // replay the draw that fixed f.leaves
      fam.place(f.y, spec.t, f.leaves, fs, leaves);
      for (size_t i = 0; i < leaves.size(); i += static_cast<size_t>(spec.d)) {
        const double dist = norm(std::span<const double>(leaves.data() + i, static_cast<size_t>(spec.d)));
        nearest = std::min(nearest, dist);
        if (dist < spec.ball_radius) ++inside;
      }
    }
    r.ball_mass = unit * static_cast<double>(inside);
  } else {
    std::sort(families.begin(), families.end(),
              [](const Family& a, const Family& b) { return a.dist < b.dist || (a.dist == b.dist && a.index < b.index); });
    FamilySampler::NearestState st;
    st.radius = spec.search_radius;
    st.delta = spec.prune_delta;
    for (const auto& f : families) {
      Stream fs = s.child(f.index);
      fam.leaf_count(spec.t, fs);
      fam.nearest(f.y, spec.t, f.leaves, fs, st);
    }
    r.pruned = st.pruned;
    nearest = st.radius < spec.search_radius ? st.radius : std::numeric_limits<double>::infinity();
  }
  finish_radius(spec, r, nearest);
  return r;
}

void ExperimentPlan::validate() const {
  if (d < 1) throw ConfigError("plan.d", "must be >= 1");
  if (targets.empty()) throw ConfigError("plan.targets", "must not be empty");
  if (replicas < 100) throw ConfigError("plan.replicas", "must be >= 100");
  if (N < 1) throw ConfigError("sim.N", "must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("plan.confidence", "must be in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("plan.epsilon", "must be in (0,1)");
  for (const auto& tg : targets) {
    if (!(tg.t > 0.0)) throw ConfigError("plan.targets", "times must be > 0");
    if (!(tg.r >= 0.0)) throw ConfigError("plan.targets", "radii must be >= 0");
  }
  if (mode == StartMode::point_mass) {
    if (static_cast<int>(x.size()) != d) throw ConfigError("plan.x", "point dimension must equal d");
    if (!(m > 0.0)) throw ConfigError("plan.m", "must be > 0");
  }
}

const EstimateRow* EstimateTable::find(double t, double r) const {
  for (const auto& row : rows)
    if (row.t == t && row.r == r) return &row;
  return nullptr;
}

PlanResult run_plan(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<double> times;
  for (const auto& tg : plan.targets) times.push_back(tg.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  PlanResult out;
  out.table.confidence = plan.confidence;
  std::map<std::pair<double, double>, EstimateRow> rows;
  const Stream master(plan.seed, plan.stream_id);
  for (size_t g = 0; g < times.size(); ++g) {
    const double t = times[g];
    double r_max = 0.0;
    for (const auto& tg : plan.targets)
      if (tg.t == t) r_max = std::max(r_max, tg.r);
    ReplicaSpec spec;
    spec.d = plan.d;
    spec.N = plan.N;
    spec.mode = plan.mode;
    spec.t = t;
    spec.x = plan.x;
    spec.m = plan.m;
    spec.prune_delta = plan.prune_delta;
    spec.population_cap = plan.population_cap;
    spec.engine = plan.engine;
    spec.search_radius = plan.search_all ? std::numeric_limits<double>::infinity() : r_max;
    double trunc = 0.0;
    if (plan.mode != StartMode::point_mass) {
      const auto w = truncation_window(plan.d, r_max, t, plan.epsilon, static_cast<double>(plan.N));
      spec.window = w.box;
      trunc = w.certified_bound;
    }
    std::vector<ReplicaResult> res(plan.replicas);
    const Stream group = master.child(g);
    parallel_for(plan.replicas, plan.jobs, [&](size_t i) { res[i] = run_replica(spec, group.child(i)); });

    std::uint64_t cap_hits = 0, censored = 0;
    double pruned = 0.0;
    for (const auto& rr : res) {
      cap_hits += rr.overflow;
      censored += rr.censored;
      pruned += rr.pruned;
    }
    for (const auto& tg : plan.targets) {
      if (tg.t != t) continue;
      EstimateRow row;
      row.d = plan.d;
      row.t = t;
      row.r = tg.r;
      row.cap_hit_count = cap_hits;
      row.censored_count = censored;
      row.n_effective = plan.replicas - cap_hits;
      for (const auto& rr : res)
        if (!rr.overflow && rr.radius >= tg.r) ++row.successes;
      if (row.n_effective > 0) {
        row.p_hat = static_cast<double>(row.successes) / static_cast<double>(row.n_effective);
        const auto iv = wilson_interval(row.successes, row.n_effective, plan.confidence);
        row.ci_lo = std::min(iv.lo, row.p_hat);
        row.ci_hi = std::max(iv.hi, row.p_hat);
      }
      row.unreliable = static_cast<double>(cap_hits) > 0.01 * static_cast<double>(plan.replicas);
      row.truncation_bound = trunc;
      row.pruned_bound = pruned / static_cast<double>(plan.replicas);
      rows[{tg.t, tg.r}] = row;
    }
    for (size_t i = 0; i < res.size(); ++i) out.records.push_back({i, t, res[i]});
  }
  for (const auto& tg : plan.targets) out.table.rows.push_back(rows.at({tg.t, tg.r}));
  return out;
}

ComparisonReport compare(const EstimateTable& mc, const std::vector<Prediction>& predictions, double z_crit) {
  std::string missing;
  for (const auto& p : predictions)
    if (!mc.find(p.t, p.r)) missing += " (t=" + std::to_string(p.t) + ", r=" + std::to_string(p.r) + ")";
  if (!missing.empty()) throw DomainError("compare: targets missing from the estimate table:" + missing);
  ComparisonReport rep;
  rep.z_crit = z_crit;
  for (const auto& p : predictions) {
    if (!(p.p >= 0.0 && p.p <= 1.0)) throw DomainError("compare: prediction outside [0,1]");
    const EstimateRow& row = *mc.find(p.t, p.r);
    ComparisonRow c;
    c.t = p.t;
    c.r = p.r;
    c.p_pred = p.p;
    c.p_hat = row.p_hat;
    c.n = row.n_effective;
    c.source = p.source;
    c.budget = p.budget;
    c.sigma = c.n > 0 ? std::sqrt(p.p * (1.0 - p.p) / static_cast<double>(c.n)) : 0.0;
    const double diff = c.p_hat - c.p_pred;
    c.z = c.sigma > 0.0 ? diff / c.sigma : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    c.pass = c.n > 0 && !row.unreliable && std::fabs(diff) <= z_crit * c.sigma + c.budget;
    rep.all_pass = rep.all_pass && c.pass;
    rep.rows.push_back(c);
  }
  return rep;
}

double NTrend::gap(double t, double r) const {
  std::vector<const NTrendRow*> hits;
  for (const auto& row : rows)
    if (row.t == t && row.r == r) hits.push_back(&row);
  if (hits.size() < 2) return 0.0;
  return std::fabs(hits[hits.size() - 1]->p_hat - hits[hits.size() - 2]->p_hat);
}

NTrend n_trend(const ExperimentPlan& plan, const std::vector<std::uint64_t>& Ns) {
  NTrend tr;
  for (size_t k = 0; k < Ns.size(); ++k) {
    ExperimentPlan p = plan;
    p.N = Ns[k];
    p.stream_id = plan.stream_id + 0x100 * (k + 1);
    tr.runs.push_back(run_plan(p));
    for (const auto& row : tr.runs.back().table.rows) {
      const double n = static_cast<double>(std::max<std::uint64_t>(row.n_effective, 1));
      tr.rows.push_back({Ns[k], row.t, row.r, row.p_hat, std::sqrt(row.p_hat * (1.0 - row.p_hat) / n)});
    }
  }
  return tr;
}

MomentReport moment_validation(const Point& x, double t, const BallSpec& ball, std::uint64_t replicas,
                               std::uint64_t N, std::uint64_t seed, unsigned jobs, double z_crit) {
  if (static_cast<int>(x.size()) != ball.dim()) throw DomainError("moment_validation: dimension mismatch");
  if (replicas < 2) throw DomainError("moment_validation: need at least two replicas");
  MomentReport rep;
  rep.t = t;
  rep.r = ball.radius;
  rep.replicas = replicas;
  rep.N = N;
  rep.m1_quad = moment1(t, ball, x);
  rep.m2_quad = moment2(t, ball, x);
  rep.pz_ratio = rep.m2_quad > 0.0 ? rep.m1_quad * rep.m1_quad / rep.m2_quad : 0.0;
  rep.finite_n_shift = (rep.m1_quad - rep.m1_quad * rep.m1_quad) / static_cast<double>(N);

  ReplicaSpec spec;
  spec.d = ball.dim();
  spec.N = N;
  spec.mode = StartMode::point_mass;
  spec.t = t;
  spec.x.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) spec.x[i] = x[i] - ball.center[i];
  spec.m = 1.0;
  spec.ball_radius = ball.radius;
  std::vector<ReplicaResult> res(replicas);
  const Stream master(seed, 0x4D4F4D);
  parallel_for(replicas, jobs, [&](size_t i) { res[i] = run_replica(spec, master.child(i)); });

  RunningStats m1, m2, hit, mass;
  for (const auto& r : res) {
    if (r.overflow) throw ResourceError("moment_validation: replica hit the population cap");
    m1.add(r.ball_mass);
    m2.add(r.ball_mass * r.ball_mass);
    hit.add(r.ball_mass > 0.0 ? 1.0 : 0.0);
    mass.add(r.total_mass);
  }
  RunningStats centered;
  for (const auto& r : res) centered.add((r.ball_mass - m1.mean()) * (r.ball_mass - m1.mean()));
  rep.m1_hat = m1.mean();
  rep.m1_se = m1.std_error();
  rep.m2_hat = m2.mean();
  rep.m2_se = m2.std_error();
  rep.var_hat = centered.mean() * static_cast<double>(replicas) / static_cast<double>(replicas - 1);
  rep.var_se = centered.std_error();
  rep.hit_hat = hit.mean();
  rep.hit_se = hit.std_error();
  rep.total_mass_hat = mass.mean();
  rep.total_mass_se = mass.std_error();
  const double var_quad = rep.m2_quad - rep.m1_quad * rep.m1_quad;
  rep.pass_m1 = std::fabs(rep.m1_hat - rep.m1_quad) <= z_crit * rep.m1_se;
  rep.pass_m2 = std::fabs(rep.m2_hat - rep.m2_quad) <= z_crit * rep.m2_se;
  rep.pass_var = rep.var_hat > 0.0 && std::fabs(rep.var_hat - var_quad) <= z_crit * rep.var_se;
  rep.pass_pz = rep.pz_ratio <= rep.hit_hat + z_crit * rep.hit_se;
  return rep;
}

}  // namespace sbm
