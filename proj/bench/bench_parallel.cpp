// Copyright 2026 The sitopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// OpenMP kernels against their serial references: the psi batch used by the
// k-section planner and the nu_E sweep.

#include <benchmark/benchmark.h>

#include <vector>

#include "sitopt/planner.hpp"
#include "sitopt/report.hpp"

namespace {

using namespace sitopt;

Params reference() {
  Biology b;
  return calibrate_capacity(b, Anchor::kFBar, 11037.0);
}

std::vector<double> durations(int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(150.0 * (i + 1) / n);
  return t;
}

void BM_PsiBatch(benchmark::State& state) {
  const Params p = reference();
  const auto taus = durations(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(psi_batch(p, taus, 800.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PsiBatchSerial(benchmark::State& state) {
  const Params p = reference();
  const auto taus = durations(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(psi_batch_serial(p, taus, 800.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const std::vector<double> kGrid{0.005, 0.01, 0.02, 0.03, 0.05, 0.1, 0.15, 0.25};

SweepOptions plan_only() {
  SweepOptions o;
  o.direct_reduced = false;
  o.direct_full = false;
  return o;
}

void BM_Sweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep(ParamConfig{}, kGrid, ProblemSpec{}, plan_only()));
}

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_serial(ParamConfig{}, kGrid, ProblemSpec{}, plan_only()));
  }
}

}  // namespace

BENCHMARK(BM_PsiBatch)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PsiBatchSerial)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
