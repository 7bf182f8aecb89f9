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

#pragma once

#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "shx/embed.hpp"

namespace shx::detail {

void train_deepwalk(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg);
void train_hpe(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// One skip-gram-with-negative-sampling step for a single (anchor, target)
/// pair. The anchor gradient is accumulated into `anchor_grad` so the
/// caller can apply it once after the negative block (word2vec style); the
/// context row is updated in place.
inline void sgns_step(double* anchor, double* target_ctx, int dims, double label, double lr,
                      double* anchor_grad) {
  double dot = 0.0;
  for (int d = 0; d < dims; ++d) dot += anchor[d] * target_ctx[d];
  const double g = (label - sigmoid(dot)) * lr;
  for (int d = 0; d < dims; ++d) {
    anchor_grad[d] += g * target_ctx[d];
    target_ctx[d] += g * anchor[d];
  }
}

/// Linear decay from lr0 to floor over `total` units of progress.
inline double decayed_lr(double lr0, double floor, std::size_t done, std::size_t total) {
  if (total == 0) return lr0;
  const double lr = lr0 * (1.0 - static_cast<double>(done) / static_cast<double>(total));
  return lr > floor ? lr : floor;
}

/// Runs fn(shard_index, begin, end) over `count` items split across
/// `workers` threads. workers == 1 runs inline, the determinism reference.
template <typename Fn>
void parallel_shards(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count == 0) {
    fn(0, static_cast<std::size_t>(0), count);
    return;
  }
  const std::size_t n = static_cast<std::size_t>(workers);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t begin = count * s / n;
    const std::size_t end = count * (s + 1) / n;
    threads.emplace_back([&fn, s, begin, end] { fn(s, begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace shx::detail
