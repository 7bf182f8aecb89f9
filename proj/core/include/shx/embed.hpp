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

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shx/alias.hpp"
#include "shx/graph.hpp"
#include "shx/rng.hpp"

namespace shx {

enum class Backend { MF, DeepWalk, HPE };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

struct TrainConfig {
  int dims = 64;
  int epochs = 5;
  double learning_rate = 0.025;
  double learning_rate_floor = 1e-4;  // linear decay ends here
  int negatives = 5;
  int walks_per_node = 10;   // DeepWalk
  int walk_length = 40;      // DeepWalk
  int window = 5;            // DeepWalk
  int hpe_walk_length = 3;   // HPE context walk, in nodes
  double lambda = 1e-4;      // MF regularization
  std::uint64_t seed = 1;
  int workers = 1;           // >1 trades bit-reproducibility for speed

  void validate() const;
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& id) const {
    return fnv1a64(id.key, 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(id.ns));
  }
};

/// Node-id -> dense vector table. Rows follow the training structure's
/// node order. Input vectors are the embedding proper; context vectors are
/// the output-side table the SGD backends train against.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::vector<NodeId> nodes, int dims, Backend trainer, std::uint64_t seed);

  int dims() const { return dims_; }
  Backend trainer() const { return trainer_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node_at(std::size_t row) const { return nodes_[row]; }

  bool contains(const NodeId& id) const { return index_.count(id) > 0; }
  std::size_t row_of(const NodeId& id) const;  // throws NotFound

  std::span<const double> vector_at(std::size_t row) const {
    return {input_.data() + row * dims_, static_cast<std::size_t>(dims_)};
  }
  std::span<const double> context_at(std::size_t row) const {
    return {context_.data() + row * dims_, static_cast<std::size_t>(dims_)};
  }
  std::span<const double> vector_of(const NodeId& id) const { return vector_at(row_of(id)); }

  std::span<double> mutable_vector_at(std::size_t row) {
    return {input_.data() + row * dims_, static_cast<std::size_t>(dims_)};
  }
  std::span<double> mutable_context_at(std::size_t row) {
    return {context_.data() + row * dims_, static_cast<std::size_t>(dims_)};
  }

  double* input_data() { return input_.data(); }
  double* context_data() { return context_.data(); }
  const double* input_data() const { return input_.data(); }

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&);

 private:
  std::vector<NodeId> nodes_;
  std::unordered_map<NodeId, std::size_t, NodeIdHash> index_;
  std::vector<double> input_;
  std::vector<double> context_;
  int dims_ = 0;
  Backend trainer_ = Backend::MF;
  std::uint64_t seed_ = 0;
};

/// Fresh model for a structure: input vectors uniform in
/// [-0.5/dims, +0.5/dims], context vectors zero.
EmbeddingModel init_model(const TrainingStructure& s, Backend backend, const TrainConfig& cfg);

/// Runs the configured number of epochs/samples on an existing model. The
/// model must have been initialized for the same structure.
void train_in_place(EmbeddingModel& model, const TrainingStructure& s, const TrainConfig& cfg);

EmbeddingModel train(const TrainingStructure& s, Backend backend, const TrainConfig& cfg);

/// Pre-trains on the source domain, seeds the target model with the
/// pretrained vectors for nodes present in both structures (the shared
/// items), and fine-tunes on the target-only structure. Target-only nodes
/// follow the exact same seed path as a plain target training run.
/// finetune_epochs < 0 means cfg.epochs.
EmbeddingModel train_transfer(const CrossDomainSystem& sys, Backend backend,
                              const TrainConfig& cfg, int finetune_epochs = -1);

// ---------------------------------------------------------------------------
// Pieces exposed for direct verification.

/// Per-edge MF loss: (w - x.y)^2 + lambda (|x|^2 + |y|^2).
double mf_pair_loss(std::span<const double> x, std::span<const double> y, double w,
                    double lambda);

/// Analytic gradient of mf_pair_loss with respect to x and y.
void mf_pair_gradient(std::span<const double> x, std::span<const double> y, double w,
                      double lambda, std::span<double> grad_x, std::span<double> grad_y);

/// Per-node alias tables over adjacency weights (empty table for isolated
/// nodes).
std::vector<AliasTable> build_transition_tables(const Graph& g);

/// Weight-proportional random walk. Returns just the start node when it is
/// isolated.
std::vector<NodeIndex> random_walk(const Graph& g, const std::vector<AliasTable>& transitions,
                                   NodeIndex start, int length, Rng& rng);

struct Arc {
  NodeIndex src;
  NodeIndex dst;
  double weight;
};

/// Both directions of every undirected edge, sorted by (src, dst).
std::vector<Arc> arc_list(const Graph& g);

/// Alias table over arc weights (HPE edge sampling).
AliasTable build_arc_table(const std::vector<Arc>& arcs);

/// Noise table over counts^power (the unigram^(3/4) convention).
AliasTable unigram_noise_table(std::span<const double> counts, double power = 0.75);

}  // namespace shx
