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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shx/error.hpp"

namespace shx {

/// Node namespaces. Items are global (one id across domains); users are
/// namespaced per domain, so identical raw user keys in the source and
/// target files stay distinct nodes.
enum class Ns : std::uint8_t { SourceUser = 0, TargetUser = 1, Item = 2 };

enum class DomainTag { Source, Target };
enum class StructureKind { Single, Highway, Superhighway };

std::string_view ns_prefix(Ns ns);                 // "su" / "tu" / "it"
std::string_view to_string(DomainTag tag);         // "source" / "target"
std::string_view to_string(StructureKind kind);    // "single" / ...
StructureKind structure_kind_from_string(std::string_view s);
DomainTag domain_tag_from_string(std::string_view s);

struct NodeId {
  Ns ns = Ns::Item;
  std::string key;

  auto operator<=>(const NodeId&) const = default;

  bool is_item() const { return ns == Ns::Item; }
  bool is_user() const { return ns != Ns::Item; }

  /// "su:alice", "tu:alice", "it:song42".
  std::string label() const;
  static NodeId from_label(std::string_view label);

  static NodeId source_user(std::string key) { return {Ns::SourceUser, std::move(key)}; }
  static NodeId target_user(std::string key) { return {Ns::TargetUser, std::move(key)}; }
  static NodeId item(std::string key) { return {Ns::Item, std::move(key)}; }
  static NodeId user(DomainTag d, std::string key) {
    return {d == DomainTag::Source ? Ns::SourceUser : Ns::TargetUser, std::move(key)};
  }
};

using NodeIndex = std::uint32_t;

struct Neighbor {
  NodeIndex node;
  double weight;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct EdgeRec {
  NodeId a;
  NodeId b;
  double weight = 1.0;
};

/// Undirected weighted graph with string-keyed nodes, immutable after
/// build(). Nodes are kept sorted by NodeId and adjacency lists sorted by
/// neighbor index, so every traversal order is deterministic.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list plus optional isolated nodes. Rejects
  /// self-loops, non-positive or non-finite weights, and duplicate edges.
  static Graph build(std::vector<EdgeRec> edges, std::vector<NodeId> isolated = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node_at(NodeIndex i) const { return nodes_[i]; }
  std::optional<NodeIndex> index_of(const NodeId& id) const;
  bool contains(const NodeId& id) const { return index_of(id).has_value(); }

  std::span<const Neighbor> adjacency(NodeIndex i) const {
    return {adj_[i].data(), adj_[i].size()};
  }
  std::size_t degree(NodeIndex i) const { return adj_[i].size(); }
  /// Sum of incident edge weights.
  double strength(NodeIndex i) const;
  bool has_edge(NodeIndex a, NodeIndex b) const;
  double total_weight() const;

  /// All adjacent (node, weight) pairs sorted by NodeId. Throws NotFound
  /// for unknown nodes.
  std::vector<std::pair<NodeId, double>> neighbors(const NodeId& id) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<NodeId> nodes_;                 // sorted, unique
  std::vector<std::vector<Neighbor>> adj_;    // sorted by neighbor index
  std::size_t edge_count_ = 0;
};

/// One domain's bipartite user-item interaction graph.
class DomainGraph {
 public:
  DomainGraph() = default;

  /// Validates bipartiteness (user namespace matching `tag` on one side,
  /// items on the other) after building the underlying graph.
  static DomainGraph build(DomainTag tag, std::vector<EdgeRec> edges,
                           std::vector<NodeId> isolated = {});

  DomainTag tag() const { return tag_; }
  const Graph& graph() const { return graph_; }

  std::size_t user_count() const { return user_count_; }
  std::size_t item_count() const { return graph_.node_count() - user_count_; }
  std::size_t edge_count() const { return graph_.edge_count(); }

  std::vector<NodeId> users() const;
  std::vector<NodeId> items() const;

  friend bool operator==(const DomainGraph&, const DomainGraph&) = default;

 private:
  DomainTag tag_ = DomainTag::Target;
  Graph graph_;
  std::size_t user_count_ = 0;
};

/// Two domains plus the shared-item bridge between them.
class CrossDomainSystem {
 public:
  CrossDomainSystem() = default;
  CrossDomainSystem(DomainGraph source, DomainGraph target);

  const DomainGraph& source() const { return source_; }
  const DomainGraph& target() const { return target_; }
  const DomainGraph& domain(DomainTag d) const {
    return d == DomainTag::Source ? source_ : target_;
  }

  /// items(source) ∩ items(target), sorted.
  const std::vector<NodeId>& shared_items() const { return shared_items_; }
  bool is_shared(const NodeId& id) const;

 private:
  DomainGraph source_;
  DomainGraph target_;
  std::vector<NodeId> shared_items_;
};

/// Construction parameters recorded alongside a built structure.
struct Provenance {
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t candidates_source = 0;
  std::uint64_t candidates_target = 0;
  std::uint64_t candidate_pairs = 0;      // |U_S^| x |U_T^|, skipped pairs included
  std::uint64_t edges_added = 0;
  std::uint64_t zero_weight_pairs = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A unified weighted graph in one of the three training shapes.
struct TrainingStructure {
  StructureKind kind = StructureKind::Single;
  Graph graph;
  Provenance provenance;

  friend bool operator==(const TrainingStructure&, const TrainingStructure&) = default;
};

/// Copy of one domain as a training structure (kind = Single). The target
/// domain is the default; the source side is used for pre-training and for
/// source-side evaluation.
TrainingStructure single_structure(const CrossDomainSystem& sys,
                                   DomainTag domain = DomainTag::Target);

/// Node/edge union of both domains with shared items merged (kind = Highway).
TrainingStructure merge_highway(const CrossDomainSystem& sys);

struct StatsReport {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t edges = 0;
  double density = 0.0;  // edges / (users * items), 0 when undefined
  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

StatsReport stats(const DomainGraph& g);
StatsReport stats(const TrainingStructure& s);

/// Re-checks every structural invariant (bipartiteness, symmetric storage,
/// positive weights, sorted order, shared-item set). Throws on violation.
void validate(const DomainGraph& g);
void validate(const CrossDomainSystem& sys);

}  // namespace shx
