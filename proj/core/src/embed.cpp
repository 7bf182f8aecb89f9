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

#include "shx/embed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "embed_internal.hpp"

namespace shx {

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::MF: return "mf";
    case Backend::DeepWalk: return "deepwalk";
    case Backend::HPE: return "hpe";
  }
  return "??";
}

Backend backend_from_string(std::string_view s) {
  if (s == "mf") return Backend::MF;
  if (s == "deepwalk") return Backend::DeepWalk;
  if (s == "hpe") return Backend::HPE;
  fail(ErrorCode::InvalidParam, "unknown model backend '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (dims <= 0) fail(ErrorCode::InvalidParam, "dims must be positive");
  if (epochs < 0) fail(ErrorCode::InvalidParam, "epochs must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorCode::InvalidParam, "learning_rate must be positive");
  }
  if (!(learning_rate_floor > 0.0) || learning_rate_floor > learning_rate) {
    fail(ErrorCode::InvalidParam, "learning_rate_floor must be in (0, learning_rate]");
  }
  if (negatives < 0) fail(ErrorCode::InvalidParam, "negatives must be >= 0");
  if (walks_per_node <= 0 || walk_length <= 0 || window <= 0 || hpe_walk_length <= 0) {
    fail(ErrorCode::InvalidParam, "walk parameters must be positive");
  }
  if (window > walk_length) fail(ErrorCode::InvalidParam, "window must be <= walk_length");
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidParam, "lambda must be >= 0");
  }
  if (workers <= 0) fail(ErrorCode::InvalidParam, "workers must be >= 1");
}

EmbeddingModel::EmbeddingModel(std::vector<NodeId> nodes, int dims, Backend trainer,
                               std::uint64_t seed)
    : nodes_(std::move(nodes)), dims_(dims), trainer_(trainer), seed_(seed) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
  input_.assign(nodes_.size() * static_cast<std::size_t>(dims_), 0.0);
  context_.assign(nodes_.size() * static_cast<std::size_t>(dims_), 0.0);
}

std::size_t EmbeddingModel::row_of(const NodeId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::NotFound, "node " + id.label() + " is not in the model");
  return it->second;
}

bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
  return a.dims_ == b.dims_ && a.trainer_ == b.trainer_ && a.seed_ == b.seed_ &&
         a.nodes_ == b.nodes_ && a.input_ == b.input_ && a.context_ == b.context_;
}

EmbeddingModel init_model(const TrainingStructure& s, Backend backend, const TrainConfig& cfg) {
  cfg.validate();
  EmbeddingModel m(s.graph.nodes(), cfg.dims, backend, cfg.seed);
  Rng rng(derive_seed(cfg.seed, "init"));
  const double half = 0.5 / static_cast<double>(cfg.dims);
  double* in = m.input_data();
  const std::size_t total = m.node_count() * static_cast<std::size_t>(cfg.dims);
  for (std::size_t i = 0; i < total; ++i) in[i] = rng.uniform(-half, half);
  return m;
}

double mf_pair_loss(std::span<const double> x, std::span<const double> y, double w,
                    double lambda) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    dot += x[d] * y[d];
    nx += x[d] * x[d];
    ny += y[d] * y[d];
  }
  const double err = w - dot;
  return err * err + lambda * (nx + ny);
}

void mf_pair_gradient(std::span<const double> x, std::span<const double> y, double w,
                      double lambda, std::span<double> grad_x, std::span<double> grad_y) {
  double dot = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) dot += x[d] * y[d];
  const double err = w - dot;
  for (std::size_t d = 0; d < x.size(); ++d) {
    grad_x[d] = -2.0 * err * y[d] + 2.0 * lambda * x[d];
    grad_y[d] = -2.0 * err * x[d] + 2.0 * lambda * y[d];
  }
}

std::vector<Arc> arc_list(const Graph& g) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * g.edge_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (const auto& n : g.adjacency(i)) arcs.push_back({i, n.node, n.weight});
  }
  return arcs;  // adjacency order is already (src, dst)-sorted
}

namespace {

// One SGD pass over a shard of arcs: the positive observation plus
// `negatives` uniformly sampled unobserved pairs treated as weight-0
// targets.
void mf_shard_pass(const Graph& g, std::span<const std::uint32_t> order,
                   std::span<const Arc> arcs, double* input, double* context, int dims,
                   const TrainConfig& cfg, Rng& rng, std::size_t progress_base,
                   std::size_t progress_total, double* loss_accum) {
  const std::size_t n_nodes = g.node_count();
  std::vector<double> gx(dims), gy(dims);
  double loss = 0.0;

  for (std::size_t t = 0; t < order.size(); ++t) {
    const Arc& arc = arcs[order[t]];
    const double lr =
        detail::decayed_lr(cfg.learning_rate, cfg.learning_rate_floor, progress_base + t,
                           progress_total);

    double* x = input + static_cast<std::size_t>(arc.src) * dims;
    double* y = context + static_cast<std::size_t>(arc.dst) * dims;
    loss += mf_pair_loss({x, static_cast<std::size_t>(dims)}, {y, static_cast<std::size_t>(dims)},
                         arc.weight, cfg.lambda);
    mf_pair_gradient({x, static_cast<std::size_t>(dims)}, {y, static_cast<std::size_t>(dims)},
                     arc.weight, cfg.lambda, gx, gy);
    for (int d = 0; d < dims; ++d) {
      x[d] -= lr * gx[d];
      y[d] -= lr * gy[d];
    }

    for (int neg = 0; neg < cfg.negatives; ++neg) {
      NodeIndex c = 0;
      bool found = false;
      for (int attempt = 0; attempt < 10; ++attempt) {
        c = static_cast<NodeIndex>(rng.uniform_int(n_nodes));
        if (c != arc.src && !g.has_edge(arc.src, c)) {
          found = true;
          break;
        }
      }
      if (!found) continue;  // tiny graphs may have no unobserved pair
      double* yc = context + static_cast<std::size_t>(c) * dims;
      mf_pair_gradient({x, static_cast<std::size_t>(dims)},
                       {yc, static_cast<std::size_t>(dims)}, 0.0, cfg.lambda, gx, gy);
      for (int d = 0; d < dims; ++d) {
        x[d] -= lr * gx[d];
        yc[d] -= lr * gy[d];
      }
    }
  }
  *loss_accum = loss;
}

void train_mf(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg) {
  const Graph& g = s.graph;
  const std::vector<Arc> arcs = arc_list(g);
  if (arcs.empty()) return;

  const std::size_t total_updates = static_cast<std::size_t>(cfg.epochs) * arcs.size();
  Rng order_rng(derive_seed(cfg.seed, "mf-order"));

  std::vector<std::uint32_t> order(arcs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    const std::size_t base = static_cast<std::size_t>(epoch) * arcs.size();

    std::vector<double> shard_loss(static_cast<std::size_t>(cfg.workers), 0.0);
    detail::parallel_shards(order.size(), cfg.workers, [&](std::size_t shard, std::size_t begin,
                                                           std::size_t end) {
      Rng rng(derive_seed(cfg.seed, "mf-neg-" + std::to_string(epoch) + "-" +
                                        std::to_string(shard)));
      mf_shard_pass(g, {order.data() + begin, end - begin}, arcs, model.input_data(),
                    model.context_data(), cfg.dims, cfg, rng, base + begin, total_updates,
                    &shard_loss[shard]);
    });

    double epoch_loss = 0.0;
    for (double l : shard_loss) epoch_loss += l;
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorCode::Divergence,
           "mf training diverged at epoch " + std::to_string(epoch) + " (learning_rate=" +
               std::to_string(cfg.learning_rate) + "); lower the learning rate");
    }
  }
}

}  // namespace

void train_in_place(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg) {
  cfg.validate();
  if (model.node_count() != s.graph.node_count() || model.dims() != cfg.dims) {
    fail(ErrorCode::InvalidParam, "model does not match the structure it is trained on");
  }
  switch (model.trainer()) {
    case Backend::MF:
      train_mf(model, s, cfg);
      break;
    case Backend::DeepWalk:
      detail::train_deepwalk(model, s, cfg);
      break;
    case Backend::HPE:
      detail::train_hpe(model, s, cfg);
      break;
  }
}

EmbeddingModel train(const TrainingStructure& s, Backend backend, const TrainConfig& cfg) {
  if (s.graph.node_count() == 0) fail(ErrorCode::InvalidParam, "cannot train on an empty graph");
  EmbeddingModel model = init_model(s, backend, cfg);
  train_in_place(model, s, cfg);
  return model;
}

EmbeddingModel train_transfer(const CrossDomainSystem& sys, Backend backend,
                              const TrainConfig& cfg, int finetune_epochs) {
  if (sys.source().edge_count() == 0 || sys.target().edge_count() == 0) {
    fail(ErrorCode::EmptyDomain, "transfer training needs both domains non-empty");
  }
  const EmbeddingModel pretrained = train(single_structure(sys, DomainTag::Source), backend, cfg);

  const TrainingStructure target = single_structure(sys, DomainTag::Target);
  EmbeddingModel model = init_model(target, backend, cfg);
  for (std::size_t row = 0; row < model.node_count(); ++row) {
    const NodeId& id = model.node_at(row);
    if (!pretrained.contains(id)) continue;
    const std::size_t src_row = pretrained.row_of(id);
    std::copy_n(pretrained.vector_at(src_row).data(), cfg.dims,
                model.mutable_vector_at(row).data());
    std::copy_n(pretrained.context_at(src_row).data(), cfg.dims,
                model.mutable_context_at(row).data());
  }

  TrainConfig fine = cfg;
  if (finetune_epochs >= 0) fine.epochs = finetune_epochs;
  train_in_place(model, target, fine);
  return model;
}

}  // namespace shx
