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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "embed_internal.hpp"
#include "shx/embed.hpp"

namespace shx {

std::vector<AliasTable> build_transition_tables(const Graph& g) {
  std::vector<AliasTable> tables(g.node_count());
  std::vector<double> weights;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto adj = g.adjacency(i);
    if (adj.empty()) continue;  // isolated node keeps an empty table
    weights.clear();
    weights.reserve(adj.size());
    for (const auto& n : adj) weights.push_back(n.weight);
    tables[i] = AliasTable(weights);
  }
  return tables;
}

std::vector<NodeIndex> random_walk(const Graph& g, const std::vector<AliasTable>& transitions,
                                   NodeIndex start, int length, Rng& rng) {
  std::vector<NodeIndex> walk;
  walk.reserve(static_cast<std::size_t>(length));
  NodeIndex cur = start;
  walk.push_back(cur);
  while (walk.size() < static_cast<std::size_t>(length)) {
    const AliasTable& t = transitions[cur];
    if (t.empty()) break;
    cur = g.adjacency(cur)[t.sample(rng)].node;
    walk.push_back(cur);
  }
  return walk;
}

AliasTable build_arc_table(const std::vector<Arc>& arcs) {
  std::vector<double> weights;
  weights.reserve(arcs.size());
  for (const Arc& a : arcs) weights.push_back(a.weight);
  return AliasTable(weights);
}

AliasTable unigram_noise_table(std::span<const double> counts, double power) {
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    weights[i] = counts[i] > 0.0 ? std::pow(counts[i], power) : 0.0;
  }
  return AliasTable(weights);
}

namespace detail {
namespace {

void check_epoch_finite(const EmbeddingModel& model, std::string_view backend, int epoch,
                        const TrainConfig& cfg) {
  const double* in = model.input_data();
  const std::size_t total = model.node_count() * static_cast<std::size_t>(model.dims());
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::isfinite(in[i])) {
      fail(ErrorCode::Divergence,
           std::string(backend) + " training diverged at epoch " + std::to_string(epoch) +
               " (learning_rate=" + std::to_string(cfg.learning_rate) +
               "); lower the learning rate");
    }
  }
}

/// One SGNS update for an (anchor, context) pair plus its negatives.
void sgns_pair(double* input, double* context, int dims, NodeIndex anchor, NodeIndex ctx,
               const AliasTable& noise, const TrainConfig& cfg, double lr, Rng& rng,
               std::vector<double>& anchor_grad) {
  double* x = input + static_cast<std::size_t>(anchor) * dims;
  std::fill(anchor_grad.begin(), anchor_grad.end(), 0.0);
  sgns_step(x, context + static_cast<std::size_t>(ctx) * dims, dims, 1.0, lr,
            anchor_grad.data());
  for (int n = 0; n < cfg.negatives; ++n) {
    const NodeIndex neg = static_cast<NodeIndex>(noise.sample(rng));
    if (neg == ctx) continue;  // drawn the positive, skip this negative
    sgns_step(x, context + static_cast<std::size_t>(neg) * dims, dims, 0.0, lr,
              anchor_grad.data());
  }
  for (int d = 0; d < dims; ++d) x[d] += anchor_grad[d];
}

std::size_t walk_pair_count(const std::vector<NodeIndex>& walk, int window) {
  std::size_t pairs = 0;
  const int len = static_cast<int>(walk.size());
  for (int i = 0; i < len; ++i) {
    const int lo = std::max(0, i - window);
    const int hi = std::min(len - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (j != i && walk[j] != walk[i]) ++pairs;
    }
  }
  return pairs;
}

}  // namespace

void train_deepwalk(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg) {
  const Graph& g = s.graph;
  if (g.node_count() == 0) return;

  const std::vector<AliasTable> transitions = build_transition_tables(g);

  // The corpus is generated up front, single threaded, so it is identical
  // no matter how many workers later consume it.
  std::vector<std::vector<NodeIndex>> walks;
  walks.reserve(static_cast<std::size_t>(cfg.walks_per_node) * g.node_count());
  Rng order_rng(derive_seed(cfg.seed, "dw-order"));
  Rng walk_rng(derive_seed(cfg.seed, "dw-walks"));
  std::vector<NodeIndex> starts(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) starts[i] = i;
  for (int round = 0; round < cfg.walks_per_node; ++round) {
    order_rng.shuffle(starts);
    for (NodeIndex start : starts) {
      walks.push_back(random_walk(g, transitions, start, cfg.walk_length, walk_rng));
    }
  }

  std::vector<double> counts(g.node_count(), 0.0);
  for (const auto& w : walks) {
    for (NodeIndex n : w) counts[n] += 1.0;
  }
  const AliasTable noise = unigram_noise_table(counts);

  std::vector<std::size_t> pair_prefix(walks.size() + 1, 0);
  for (std::size_t w = 0; w < walks.size(); ++w) {
    pair_prefix[w + 1] = pair_prefix[w] + walk_pair_count(walks[w], cfg.window);
  }
  const std::size_t pairs_per_epoch = pair_prefix.back();
  if (pairs_per_epoch == 0) return;
  const std::size_t total_pairs = static_cast<std::size_t>(cfg.epochs) * pairs_per_epoch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::size_t epoch_base = static_cast<std::size_t>(epoch) * pairs_per_epoch;
    parallel_shards(walks.size(), cfg.workers, [&](std::size_t shard, std::size_t begin,
                                                   std::size_t end) {
      Rng rng(derive_seed(cfg.seed,
                          "dw-neg-" + std::to_string(epoch) + "-" + std::to_string(shard)));
      std::vector<double> anchor_grad(static_cast<std::size_t>(cfg.dims));
      std::size_t progress = epoch_base + pair_prefix[begin];
      for (std::size_t w = begin; w < end; ++w) {
        const auto& walk = walks[w];
        const int len = static_cast<int>(walk.size());
        for (int i = 0; i < len; ++i) {
          const int lo = std::max(0, i - cfg.window);
          const int hi = std::min(len - 1, i + cfg.window);
          for (int j = lo; j <= hi; ++j) {
            if (j == i || walk[j] == walk[i]) continue;
            const double lr = decayed_lr(cfg.learning_rate, cfg.learning_rate_floor, progress,
                                         total_pairs);
            sgns_pair(model.input_data(), model.context_data(), cfg.dims, walk[i], walk[j],
                      noise, cfg, lr, rng, anchor_grad);
            ++progress;
          }
        }
      }
    });
    check_epoch_finite(model, "deepwalk", epoch, cfg);
  }
}

void train_hpe(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg) {
  const Graph& g = s.graph;
  if (g.node_count() == 0 || g.edge_count() == 0) return;

  const std::vector<AliasTable> transitions = build_transition_tables(g);
  const std::vector<Arc> arcs = arc_list(g);
  const AliasTable arc_table = build_arc_table(arcs);

  std::vector<double> strengths(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) strengths[i] = g.strength(i);
  const AliasTable noise = unigram_noise_table(strengths);

  const std::size_t samples_per_epoch = arcs.size();
  const std::size_t total_samples = static_cast<std::size_t>(cfg.epochs) * samples_per_epoch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::size_t epoch_base = static_cast<std::size_t>(epoch) * samples_per_epoch;
    parallel_shards(samples_per_epoch, cfg.workers, [&](std::size_t shard, std::size_t begin,
                                                        std::size_t end) {
      Rng rng(derive_seed(cfg.seed,
                          "hpe-" + std::to_string(epoch) + "-" + std::to_string(shard)));
      std::vector<double> anchor_grad(static_cast<std::size_t>(cfg.dims));
      for (std::size_t t = begin; t < end; ++t) {
        const Arc& arc = arcs[arc_table.sample(rng)];
        const std::vector<NodeIndex> walk =
            random_walk(g, transitions, arc.dst, cfg.hpe_walk_length, rng);
        const double lr = decayed_lr(cfg.learning_rate, cfg.learning_rate_floor,
                                     epoch_base + t, total_samples);
        for (NodeIndex ctx : walk) {
          if (ctx == arc.src) continue;
          sgns_pair(model.input_data(), model.context_data(), cfg.dims, arc.src, ctx, noise,
                    cfg, lr, rng, anchor_grad);
        }
      }
    });
    check_epoch_finite(model, "hpe", epoch, cfg);
  }
}

}  // namespace detail
}  // namespace shx
