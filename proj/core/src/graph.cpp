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

#include "shx/graph.hpp"

#include <algorithm>
#include <cmath>

namespace shx {

std::string_view ns_prefix(Ns ns) {
  switch (ns) {
    case Ns::SourceUser: return "su";
    case Ns::TargetUser: return "tu";
    case Ns::Item: return "it";
  }
  return "??";
}

std::string_view to_string(DomainTag tag) {
  return tag == DomainTag::Source ? "source" : "target";
}

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Single: return "single";
    case StructureKind::Highway: return "highway";
    case StructureKind::Superhighway: return "superhighway";
  }
  return "??";
}

StructureKind structure_kind_from_string(std::string_view s) {
  if (s == "single") return StructureKind::Single;
  if (s == "highway") return StructureKind::Highway;
  if (s == "superhighway") return StructureKind::Superhighway;
  fail(ErrorCode::InvalidParam, "unknown structure kind '" + std::string(s) + "'");
}

DomainTag domain_tag_from_string(std::string_view s) {
  if (s == "source") return DomainTag::Source;
  if (s == "target") return DomainTag::Target;
  fail(ErrorCode::InvalidParam, "unknown domain '" + std::string(s) + "'");
}

std::string NodeId::label() const {
  std::string out(ns_prefix(ns));
  out += ':';
  out += key;
  return out;
}

NodeId NodeId::from_label(std::string_view label) {
  const auto colon = label.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::InvalidParam, "node label '" + std::string(label) + "' has no namespace");
  }
  const std::string_view prefix = label.substr(0, colon);
  std::string key(label.substr(colon + 1));
  if (key.empty()) fail(ErrorCode::InvalidParam, "node label '" + std::string(label) + "' has empty key");
  if (prefix == "su") return source_user(std::move(key));
  if (prefix == "tu") return target_user(std::move(key));
  if (prefix == "it") return item(std::move(key));
  fail(ErrorCode::InvalidParam, "unknown node namespace '" + std::string(prefix) + "'");
}

Graph Graph::build(std::vector<EdgeRec> edges, std::vector<NodeId> isolated) {
  Graph g;

  std::vector<NodeId> nodes;
  nodes.reserve(edges.size() * 2 + isolated.size());
  for (const auto& e : edges) {
    if (e.a == e.b) fail(ErrorCode::InvalidParam, "self-loop on " + e.a.label());
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      fail(ErrorCode::InvalidParam,
           "edge " + e.a.label() + " -- " + e.b.label() + " has non-positive weight");
    }
    nodes.push_back(e.a);
    nodes.push_back(e.b);
  }
  for (auto& n : isolated) nodes.push_back(std::move(n));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  g.nodes_ = std::move(nodes);

  auto index_of = [&g](const NodeId& id) {
    const auto it = std::lower_bound(g.nodes_.begin(), g.nodes_.end(), id);
    return static_cast<NodeIndex>(it - g.nodes_.begin());
  };

  g.adj_.assign(g.nodes_.size(), {});
  for (const auto& e : edges) {
    const NodeIndex ia = index_of(e.a);
    const NodeIndex ib = index_of(e.b);
    g.adj_[ia].push_back({ib, e.weight});
    g.adj_[ib].push_back({ia, e.weight});
  }
  for (std::size_t i = 0; i < g.adj_.size(); ++i) {
    auto& list = g.adj_[i];
    std::sort(list.begin(), list.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (list[k].node == list[k - 1].node) {
        fail(ErrorCode::InvalidParam,
             "duplicate edge " + g.nodes_[i].label() + " -- " + g.nodes_[list[k].node].label());
      }
    }
    list.shrink_to_fit();
  }
  g.edge_count_ = edges.size();
  return g;
}

std::optional<NodeIndex> Graph::index_of(const NodeId& id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

double Graph::strength(NodeIndex i) const {
  double s = 0.0;
  for (const auto& n : adj_[i]) s += n.weight;
  return s;
}

bool Graph::has_edge(NodeIndex a, NodeIndex b) const {
  const auto& list = adj_[a];
  const auto it = std::lower_bound(
      list.begin(), list.end(), b,
      [](const Neighbor& n, NodeIndex idx) { return n.node < idx; });
  return it != list.end() && it->node == b;
}

double Graph::total_weight() const {
  double s = 0.0;
  for (std::size_t i = 0; i < adj_.size(); ++i) s += strength(static_cast<NodeIndex>(i));
  return s / 2.0;
}

std::vector<std::pair<NodeId, double>> Graph::neighbors(const NodeId& id) const {
  const auto idx = index_of(id);
  if (!idx) fail(ErrorCode::NotFound, "node " + id.label() + " is not in the graph");
  std::vector<std::pair<NodeId, double>> out;
  out.reserve(adj_[*idx].size());
  // adjacency is sorted by index and nodes_ is sorted by NodeId, so this
  // comes out sorted by NodeId already
  for (const auto& n : adj_[*idx]) out.emplace_back(nodes_[n.node], n.weight);
  return out;
}

DomainGraph DomainGraph::build(DomainTag tag, std::vector<EdgeRec> edges,
                               std::vector<NodeId> isolated) {
  DomainGraph dg;
  dg.tag_ = tag;
  dg.graph_ = Graph::build(std::move(edges), std::move(isolated));

  const Ns user_ns = tag == DomainTag::Source ? Ns::SourceUser : Ns::TargetUser;
  std::size_t users = 0;
  for (const auto& n : dg.graph_.nodes()) {
    if (n.ns == user_ns) {
      ++users;
    } else if (n.ns != Ns::Item) {
      fail(ErrorCode::InvalidParam,
           "node " + n.label() + " does not belong to the " + std::string(to_string(tag)) +
               " domain");
    }
  }
  dg.user_count_ = users;
  validate(dg);
  return dg;
}

std::vector<NodeId> DomainGraph::users() const {
  std::vector<NodeId> out;
  out.reserve(user_count_);
  for (const auto& n : graph_.nodes()) {
    if (n.is_user()) out.push_back(n);
  }
  return out;
}

std::vector<NodeId> DomainGraph::items() const {
  std::vector<NodeId> out;
  out.reserve(item_count());
  for (const auto& n : graph_.nodes()) {
    if (n.is_item()) out.push_back(n);
  }
  return out;
}

CrossDomainSystem::CrossDomainSystem(DomainGraph source, DomainGraph target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (source_.tag() != DomainTag::Source || target_.tag() != DomainTag::Target) {
    fail(ErrorCode::DomainMismatch, "system needs a source-tagged and a target-tagged graph");
  }
  const auto si = source_.items();
  const auto ti = target_.items();
  std::set_intersection(si.begin(), si.end(), ti.begin(), ti.end(),
                        std::back_inserter(shared_items_));
}

bool CrossDomainSystem::is_shared(const NodeId& id) const {
  return std::binary_search(shared_items_.begin(), shared_items_.end(), id);
}

TrainingStructure single_structure(const CrossDomainSystem& sys, DomainTag domain) {
  TrainingStructure s;
  s.kind = StructureKind::Single;
  s.graph = sys.domain(domain).graph();
  return s;
}

TrainingStructure merge_highway(const CrossDomainSystem& sys) {
  // Users are namespaced per domain and items are global, so the union
  // cannot produce duplicate (user, item) pairs; shared items merge by id.
  std::vector<EdgeRec> edges;
  std::vector<NodeId> isolated;
  for (const DomainGraph* dg : {&sys.source(), &sys.target()}) {
    const Graph& g = dg->graph();
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      if (g.degree(i) == 0) isolated.push_back(g.node_at(i));
      for (const auto& n : g.adjacency(i)) {
        if (n.node > i) edges.push_back({g.node_at(i), g.node_at(n.node), n.weight});
      }
    }
  }
  TrainingStructure s;
  s.kind = StructureKind::Highway;
  s.graph = Graph::build(std::move(edges), std::move(isolated));
  return s;
}

namespace {

StatsReport stats_of_graph(const Graph& g, std::size_t edges) {
  StatsReport r;
  for (const auto& n : g.nodes()) {
    if (n.is_item()) {
      ++r.items;
    } else {
      ++r.users;
    }
  }
  r.edges = edges;
  const double denom = static_cast<double>(r.users) * static_cast<double>(r.items);
  r.density = denom > 0.0 ? static_cast<double>(r.edges) / denom : 0.0;
  return r;
}

}  // namespace

StatsReport stats(const DomainGraph& g) { return stats_of_graph(g.graph(), g.edge_count()); }

StatsReport stats(const TrainingStructure& s) {
  return stats_of_graph(s.graph, s.graph.edge_count());
}

void validate(const DomainGraph& dg) {
  const Graph& g = dg.graph();
  const Ns user_ns = dg.tag() == DomainTag::Source ? Ns::SourceUser : Ns::TargetUser;
  std::size_t half_edges = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const NodeId& a = g.node_at(i);
    if (a.ns != user_ns && a.ns != Ns::Item) {
      fail(ErrorCode::InvalidParam, "foreign node " + a.label());
    }
    for (const auto& n : g.adjacency(i)) {
      const NodeId& b = g.node_at(n.node);
      // 2-coloring over namespaces: every edge joins a user and an item
      if (a.is_item() == b.is_item()) {
        fail(ErrorCode::InvalidParam,
             "edge " + a.label() + " -- " + b.label() + " breaks bipartiteness");
      }
      if (!(n.weight > 0.0) || !std::isfinite(n.weight)) {
        fail(ErrorCode::InvalidParam, "edge " + a.label() + " -- " + b.label() + " bad weight");
      }
      if (!g.has_edge(n.node, i)) {
        fail(ErrorCode::InvalidParam, "asymmetric edge " + a.label() + " -- " + b.label());
      }
      ++half_edges;
    }
  }
  if (half_edges != 2 * g.edge_count()) {
    fail(ErrorCode::InvalidParam, "degree sum does not equal twice the edge count");
  }
}

void validate(const CrossDomainSystem& sys) {
  validate(sys.source());
  validate(sys.target());
  const auto si = sys.source().items();
  const auto ti = sys.target().items();
  std::vector<NodeId> expect;
  std::set_intersection(si.begin(), si.end(), ti.begin(), ti.end(), std::back_inserter(expect));
  if (expect != sys.shared_items()) {
    fail(ErrorCode::InvalidParam, "shared-item set is stale");
  }
}

}  // namespace shx
