/*
 * Copyright 2026 The shx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "shx/construct.hpp"
#include "shx/data.hpp"
#include "shx/embed.hpp"

namespace {

shx::TrainingStructure bench_structure() {
  shx::SynthConfig cfg;
  cfg.users_source = 1000;
  cfg.users_target = 250;
  cfg.items_source = 500;
  cfg.items_target = 300;
  cfg.overlap_ratio = 0.4;
  cfg.interactions_per_user = 12;
  cfg.noise = 0.2;
  cfg.seed = 7;
  const shx::CrossDomainSystem sys = shx::generate_synthetic(cfg).sys;
  return shx::construct_superhighway(sys, {0.5, 1.0, 100'000'000});
}

shx::TrainConfig one_epoch(int workers) {
  shx::TrainConfig cfg;
  cfg.dims = 32;
  cfg.epochs = 1;
  cfg.negatives = 5;
  cfg.walks_per_node = 5;
  cfg.walk_length = 20;
  cfg.window = 3;
  cfg.seed = 7;
  cfg.workers = workers;
  return cfg;
}

void BM_TrainEpoch(benchmark::State& state, shx::Backend backend) {
  const shx::TrainingStructure ts = bench_structure();
  const shx::TrainConfig cfg = one_epoch(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::train(ts, backend, cfg));
  }
}

void BM_TrainMF(benchmark::State& state) { BM_TrainEpoch(state, shx::Backend::MF); }
void BM_TrainDeepWalk(benchmark::State& state) {
  BM_TrainEpoch(state, shx::Backend::DeepWalk);
}
void BM_TrainHPE(benchmark::State& state) { BM_TrainEpoch(state, shx::Backend::HPE); }

BENCHMARK(BM_TrainMF)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainDeepWalk)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainHPE)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
