// Copyright 2026 The otcoreset Authors
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "otcoreset/greedy.hpp"
#include "otcoreset/kernels.hpp"
#include "otcoreset/oracle.hpp"
#include "otcoreset/ot_solver.hpp"

namespace otcoreset {
namespace {

struct Fixture {
  Pool train, val;
  PooCostMatrix m;
  IndexList set;
  std::vector<double> u;
  std::vector<double> col_mins;
  std::vector<char> in_set;
  std::vector<Index> member_pos;
};

const Fixture& Get(std::size_t n_train) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n_train);
  if (it != cache.end()) return it->second;
  Fixture f;
  oracle::SynthOptions o;
  o.seed = 1;
  o.n_train = n_train;
  o.n_val = 500;
  o.dim = 64;
  std::tie(f.train, f.val) = oracle::SynthPools(o);
  f.m = BuildPooMatrix(ComputeDistances(f.train, f.val), f.train.GradNormsAsDouble(), 0.1);
  f.set = GreedySelect(f.m, 32).state.selected;
  f.u = SolveOtOnSubset(f.m, f.set).dual_u;
  f.col_mins = ColumnMinima(f.m, f.set);
  f.in_set.assign(n_train, 0);
  f.member_pos.assign(n_train, -1);
  for (std::size_t k = 0; k < f.set.size(); ++k) {
    f.in_set[f.set[k]] = 1;
    f.member_pos[f.set[k]] = static_cast<Index>(k);
  }
  return cache.emplace(n_train, std::move(f)).first->second;
}

template <bool kParallel>
void BM_DistanceRows(benchmark::State& state) {
  const Fixture& f = Get(static_cast<std::size_t>(state.range(0)));
  IndexList rows(f.train.size());
  std::iota(rows.begin(), rows.end(), Index{0});
  Matrix out(rows.size(), f.val.size());
  for (auto _ : state) {
    if constexpr (kParallel)
      kernels::omp::DistanceRows(f.train, f.val, rows, Metric::kEuclidean, out);
    else
      kernels::serial::DistanceRows(f.train, f.val, rows, Metric::kEuclidean, out);
    benchmark::DoNotOptimize(out.data().data());
  }
}

template <bool kParallel>
void BM_Gains(benchmark::State& state) {
  const Fixture& f = Get(static_cast<std::size_t>(state.range(0)));
  std::vector<double> gains(f.m.rows());
  for (auto _ : state) {
    if constexpr (kParallel)
      kernels::omp::Gains(f.m, f.col_mins, f.in_set, false, gains);
    else
      kernels::serial::Gains(f.m, f.col_mins, f.in_set, false, gains);
    benchmark::DoNotOptimize(gains.data());
  }
}

template <bool kParallel>
void BM_Estimates(benchmark::State& state) {
  const Fixture& f = Get(static_cast<std::size_t>(state.range(0)));
  std::vector<kernels::KnotEstimate> out(f.m.rows());
  for (auto _ : state) {
    if constexpr (kParallel) {
      const kernels::DualEnvelope env = kernels::omp::BuildEnvelope(f.m, f.set, f.u);
      kernels::omp::Estimates(f.m, env, f.member_pos, f.set.size(), out);
    } else {
      const kernels::DualEnvelope env = kernels::serial::BuildEnvelope(f.m, f.set, f.u);
      kernels::serial::Estimates(f.m, env, f.member_pos, f.set.size(), out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_DistanceRows<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceRows<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gains<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gains<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimates<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimates<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace otcoreset

BENCHMARK_MAIN();
