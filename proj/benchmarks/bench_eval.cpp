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

#include <set>
#include <string>
#include <vector>

#include "shx/construct.hpp"
#include "shx/data.hpp"
#include "shx/embed.hpp"
#include "shx/eval.hpp"

namespace {

struct EvalFixture {
  shx::EmbeddingModel model;
  shx::EvalSplit split;
};

EvalFixture make_fixture() {
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
  auto [post, esplit] = shx::split(sys, 0.2, 7, shx::DomainTag::Target);

  shx::TrainConfig train;
  train.dims = 16;
  train.epochs = 1;
  train.seed = 7;
  const shx::TrainingStructure ts = shx::construct_superhighway(post, {0.5, 1.0, 100'000'000});
  return {shx::train(ts, shx::Backend::MF, train), std::move(esplit)};
}

void BM_Evaluate(benchmark::State& state) {
  const EvalFixture fx = make_fixture();
  shx::EvalOptions opts;
  opts.k = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::evaluate(fx.model, fx.split, opts));
  }
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

void BM_AveragePrecision(benchmark::State& state) {
  std::vector<shx::NodeId> ranked;
  ranked.reserve(1000);
  for (int j = 0; j < 1000; ++j) ranked.push_back(shx::NodeId::item("p" + std::to_string(j)));
  std::set<shx::NodeId> relevant;
  for (int j = 0; j < 1000; j += 97) relevant.insert(ranked[static_cast<std::size_t>(j)]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shx::average_precision_at_k(ranked, relevant, 10));
  }
}
BENCHMARK(BM_AveragePrecision)->Unit(benchmark::kNanosecond);

}  // namespace

BENCHMARK_MAIN();
