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

#include "shx/construct.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace shx {

void ConstructionParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha)) {
    fail(ErrorCode::InvalidParam, "alpha must be in (0, 1]");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::InvalidParam, "beta must be finite and >= 0");
  }
  if (pair_cap == 0) fail(ErrorCode::InvalidParam, "pair cap must be positive");
}

CandidateSet identify_candidates(const CrossDomainSystem& sys, DomainTag domain, double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha)) {
    fail(ErrorCode::InvalidParam, "alpha must be in (0, 1]");
  }
  if (sys.shared_items().empty()) {
    fail(ErrorCode::EmptySharedItems,
         "no shared items between domains; superhighway construction is undefined");
  }

  const Graph& g = sys.domain(domain).graph();
  CandidateSet out;
  out.domain = domain;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const NodeId& u = g.node_at(i);
    if (!u.is_user()) continue;
    const auto adj = g.adjacency(i);
    if (adj.empty()) continue;
    std::size_t shared = 0;
    for (const auto& n : adj) {
      if (sys.is_shared(g.node_at(n.node))) ++shared;
    }
    const double ratio = static_cast<double>(shared) / static_cast<double>(adj.size());
    if (ratio >= alpha) {
      out.users.push_back(u);
      out.smoothness.push_back(ratio);
    }
  }
  return out;
}

double superhighway_weight(const CrossDomainSystem& sys, const NodeId& u_src,
                           const NodeId& u_tgt, double beta) {
  if (u_src.ns != Ns::SourceUser || !sys.source().graph().contains(u_src)) {
    fail(ErrorCode::DomainMismatch, u_src.label() + " is not a source-domain user");
  }
  if (u_tgt.ns != Ns::TargetUser || !sys.target().graph().contains(u_tgt)) {
    fail(ErrorCode::DomainMismatch, u_tgt.label() + " is not a target-domain user");
  }
  const auto ns = sys.source().graph().neighbors(u_src);
  const auto nt = sys.target().graph().neighbors(u_tgt);
  // both lists are sorted by NodeId; items are global, so a plain sorted
  // intersection over the merged identity space works
  std::size_t overlap = 0;
  std::size_t i = 0, j = 0;
  while (i < ns.size() && j < nt.size()) {
    if (ns[i].first < nt[j].first) {
      ++i;
    } else if (nt[j].first < ns[i].first) {
      ++j;
    } else {
      ++overlap;
      ++i;
      ++j;
    }
  }
  return beta * static_cast<double>(overlap);
}

CandidatePairs compute_candidate_pairs(const CrossDomainSystem& sys, double alpha,
                                       std::uint64_t pair_cap) {
  CandidatePairs out;
  out.alpha = alpha;
  out.source = identify_candidates(sys, DomainTag::Source, alpha);
  out.target = identify_candidates(sys, DomainTag::Target, alpha);
  out.candidate_pairs =
      static_cast<std::uint64_t>(out.source.size()) * static_cast<std::uint64_t>(out.target.size());
  if (out.candidate_pairs > pair_cap) {
    fail(ErrorCode::CapExceeded,
         "candidate product " + std::to_string(out.candidate_pairs) + " exceeds cap " +
             std::to_string(pair_cap) + "; raise alpha to shrink the candidate sets");
  }

  const Graph& gs = sys.source().graph();
  const Graph& gt = sys.target().graph();

  // Positive intersections accumulated per shared item: only shared items
  // can sit in both neighborhoods, so for each shared item every adjacent
  // (source candidate, target candidate) pair gains one co-interaction.
  std::vector<char> src_is_candidate(gs.node_count(), 0);
  std::vector<char> tgt_is_candidate(gt.node_count(), 0);
  for (const auto& u : out.source.users) src_is_candidate[*gs.index_of(u)] = 1;
  for (const auto& u : out.target.users) tgt_is_candidate[*gt.index_of(u)] = 1;

  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  for (const auto& item : sys.shared_items()) {
    const auto is = gs.index_of(item);
    const auto it = gt.index_of(item);
    if (!is || !it) continue;
    for (const auto& a : gs.adjacency(*is)) {
      if (!src_is_candidate[a.node]) continue;
      for (const auto& b : gt.adjacency(*it)) {
        if (!tgt_is_candidate[b.node]) continue;
        const std::uint64_t key =
            (static_cast<std::uint64_t>(a.node) << 32) | static_cast<std::uint64_t>(b.node);
        ++counts[key];
      }
    }
  }

  out.overlaps.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    const NodeIndex si = static_cast<NodeIndex>(key >> 32);
    const NodeIndex ti = static_cast<NodeIndex>(key & 0xffffffffULL);
    out.overlaps.emplace_back(gs.node_at(si), gt.node_at(ti), count);
  }
  std::sort(out.overlaps.begin(), out.overlaps.end());
  out.zero_weight_pairs = out.candidate_pairs - static_cast<std::uint64_t>(out.overlaps.size());
  return out;
}

TrainingStructure materialize_superhighway(const CrossDomainSystem& sys,
                                           const CandidatePairs& pairs, double beta) {
  TrainingStructure highway = merge_highway(sys);

  std::vector<EdgeRec> edges;
  std::vector<NodeId> isolated;
  const Graph& hg = highway.graph;
  for (NodeIndex i = 0; i < hg.node_count(); ++i) {
    if (hg.degree(i) == 0) isolated.push_back(hg.node_at(i));
    for (const auto& n : hg.adjacency(i)) {
      if (n.node > i) edges.push_back({hg.node_at(i), hg.node_at(n.node), n.weight});
    }
  }

  std::uint64_t added = 0;
  if (beta > 0.0) {
    for (const auto& [us, ut, count] : pairs.overlaps) {
      edges.push_back({us, ut, beta * static_cast<double>(count)});
      ++added;
    }
  }

  TrainingStructure s;
  s.kind = StructureKind::Superhighway;
  s.graph = Graph::build(std::move(edges), std::move(isolated));
  s.provenance.alpha = pairs.alpha;
  s.provenance.beta = beta;
  s.provenance.candidates_source = pairs.source.size();
  s.provenance.candidates_target = pairs.target.size();
  s.provenance.candidate_pairs = pairs.candidate_pairs;
  s.provenance.edges_added = added;
  s.provenance.zero_weight_pairs =
      beta > 0.0 ? pairs.zero_weight_pairs : pairs.candidate_pairs;
  return s;
}

TrainingStructure construct_superhighway(const CrossDomainSystem& sys,
                                         const ConstructionParams& params) {
  params.validate();
  const CandidatePairs pairs = compute_candidate_pairs(sys, params.alpha, params.pair_cap);
  return materialize_superhighway(sys, pairs, params.beta);
}

}  // namespace shx
