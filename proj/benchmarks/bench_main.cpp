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

#include <benchmark/benchmark.h>

#include <vector>

#include "sbm/harness.hpp"
#include "sbm/moments.hpp"
#include "sbm/particle_system.hpp"
#include "sbm/pde.hpp"
#include "sbm/rng.hpp"

namespace {

void BM_PhiloxNormal(benchmark::State& state) {
  sbm::Stream s(1, 2);
  double acc = 0.0;
  for (auto _ : state) acc += s.normal();
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxNormal);

void BM_EventDrivenAdvance(benchmark::State& state) {
  sbm::SimConfig c;
  c.d = 2;
  c.N = static_cast<std::uint64_t>(state.range(0));
  c.window = sbm::Box::centered(2, 1.0);
  const std::vector<double> x = {0.0, 0.0};
  const auto ps = sbm::init_point_mass(c, x, 1.0);
  std::uint64_t k = 0;
  for (auto _ : state) {
    sbm::Stream s(3, k++);
    benchmark::DoNotOptimize(sbm::advance(ps, 1.0, s, c.N, sbm::Engine::event_driven));
  }
}
BENCHMARK(BM_EventDrivenAdvance)->Arg(20)->Arg(100);

// One empty-ball replica in d = 3 from a Poisson start, as in the d = 3 recipe.
void BM_GenealogyReplicaD3(benchmark::State& state) {
  sbm::ReplicaSpec spec;
  spec.d = 3;
  spec.N = 100;
  spec.t = static_cast<double>(state.range(0));
  spec.window = sbm::truncation_window(3, 2.0, spec.t, 1e-6).box;
  spec.search_radius = 2.0;
  spec.prune_delta = 1e-8;
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sbm::run_replica(spec, sbm::Stream(5, k++)));
}
BENCHMARK(BM_GenealogyReplicaD3)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RadialSolve(benchmark::State& state) {
  sbm::PdeConfig c;
  c.d = static_cast<int>(state.range(0));
  c.r = 1.0;
  c.t_final = 4.0;
  c.mode = sbm::InitialMode::layer;
  c.t0 = 0.01;
  c.h = 0.01;
  c.keep_profiles = false;
  sbm::fit_outer_radius(c);
  for (auto _ : state) benchmark::DoNotOptimize(sbm::solve_radial(c));
}
BENCHMARK(BM_RadialSolve)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Moment2(benchmark::State& state) {
  const auto ball = sbm::BallSpec::centered(3, 1.0);
  const std::vector<double> x = {0.5, 0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(sbm::moment2(1.0, ball, x));
}
BENCHMARK(BM_Moment2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
