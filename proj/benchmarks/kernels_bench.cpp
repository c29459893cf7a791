// Copyright 2026 The fdasf Authors
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

#include "fdasf/dasf.hpp"
#include "fdasf/harness.hpp"
#include "fdasf/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using fdasf::Index;
using fdasf::Matrix;

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = n(rng);
  return A;
}

Matrix spd(Index n, std::mt19937_64& rng) {
  const Matrix A = gaussian(n, n, rng);
  return A * A.transpose() / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n);
}

void BM_GevdTopQ(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Index n = state.range(0);
  const Matrix S = spd(n, rng), C = spd(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fdasf::gevd_top_q(S, C, 2));
}
BENCHMARK(BM_GevdTopQ)->Arg(20)->Arg(50)->Arg(100);

void BM_GtrsSolve(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Index n = state.range(0);
  const Matrix A = gaussian(n, n, rng);
  const Matrix H = 0.5 * (A + A.transpose());  // indefinite
  const Matrix G = spd(n, rng);
  const fdasf::Vector b = gaussian(n, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fdasf::gtrs_solve(H, b, G, 1.0));
}
BENCHMARK(BM_GtrsSolve)->Arg(20)->Arg(50);

// One network iteration on the TRO table instance with a fresh batch.
void BM_Iterate(benchmark::State& state) {
  fdasf::ExperimentConfig c = fdasf::table_config(fdasf::ProblemKind::Tro);
  const bool exact = state.range(1) != 0;
  const auto inst = fdasf::make_instance(c, 0);
  auto st = fdasf::DistributedState::from_stacked(fdasf::initial_point(inst, 3), inst.topology);
  const fdasf::SampleBatch batch = fdasf::sample_batch(inst.model, 0, c.N, 5);
  fdasf::IterationInput input;
  if (exact) {
    input.exact = &inst.exact;
    input.nominal_samples = c.N;
  } else {
    input.batch = &batch;
  }
  fdasf::EngineOptions o;
  o.mode = state.range(0) == 0 ? fdasf::Mode::FDASF : fdasf::Mode::DASF;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdasf::iterate(st, inst.topology, *inst.problem, inst.fixed, input, o));
  }
}
BENCHMARK(BM_Iterate)->Args({0, 0})->Args({1, 0})->Args({0, 1})->Args({1, 1});

}  // namespace

BENCHMARK_MAIN();
