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

#include <cstddef>

#include "shx/construct.hpp"
#include "shx/data.hpp"

namespace {

shx::CrossDomainSystem make_system(std::size_t users_source) {
  shx::SynthConfig cfg;
  cfg.users_source = users_source;
  cfg.users_target = users_source / 4;
  cfg.items_source = users_source / 2;
  cfg.items_target = users_source / 3;
  cfg.overlap_ratio = 0.4;
  cfg.interactions_per_user = 12;
  cfg.noise = 0.2;
  cfg.seed = 7;
  return shx::generate_synthetic(cfg).sys;
}

void BM_IdentifyCandidates(benchmark::State& state) {
  const shx::CrossDomainSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::identify_candidates(sys, shx::DomainTag::Source, 0.5));
    benchmark::DoNotOptimize(shx::identify_candidates(sys, shx::DomainTag::Target, 0.5));
  }
}
BENCHMARK(BM_IdentifyCandidates)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);

void BM_CandidatePairs(benchmark::State& state) {
  const shx::CrossDomainSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::compute_candidate_pairs(sys, 0.5, 100'000'000));
  }
}
BENCHMARK(BM_CandidatePairs)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ConstructSuperhighway(benchmark::State& state) {
  const shx::CrossDomainSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  const shx::ConstructionParams params{0.5, 1.0, 100'000'000};
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::construct_superhighway(sys, params));
  }
}
BENCHMARK(BM_ConstructSuperhighway)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_MergeHighway(benchmark::State& state) {
  const shx::CrossDomainSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::merge_highway(sys));
  }
}
BENCHMARK(BM_MergeHighway)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
