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
#include <vector>

#include "shx/graph.hpp"

namespace shx {

struct ConstructionParams {
  double alpha = 0.5;                       // smoothness threshold, in (0, 1]
  double beta = 1.0;                        // alignment scaling factor, >= 0
  std::uint64_t pair_cap = 100'000'000;     // bound on |U_S^| x |U_T^|

  void validate() const;
};

/// Users of one domain whose neighborhoods are smooth enough over the
/// shared items: |N(u) ∩ Ĩ| / |N(u)| >= alpha. Zero-degree users are never
/// members (the ratio is undefined for them).
struct CandidateSet {
  DomainTag domain = DomainTag::Source;
  std::vector<NodeId> users;        // sorted
  std::vector<double> smoothness;   // aligned with users

  std::size_t size() const { return users.size(); }
};

CandidateSet identify_candidates(const CrossDomainSystem& sys, DomainTag domain, double alpha);

/// beta x |N(u_src) ∩ N(u_tgt)|, neighborhoods taken over the merged item
/// identity space (only shared items can contribute).
double superhighway_weight(const CrossDomainSystem& sys, const NodeId& u_src,
                           const NodeId& u_tgt, double beta);

/// Candidate sets plus the per-pair neighborhood-intersection counts for
/// one alpha. Weighting is deferred so a beta sweep can reuse this.
struct CandidatePairs {
  double alpha = 0.0;
  CandidateSet source;
  CandidateSet target;
  /// Pairs with a non-empty intersection, sorted by (src, tgt); the count
  /// is the raw |N(u_src) ∩ N(u_tgt)| before scaling.
  std::vector<std::tuple<NodeId, NodeId, std::uint32_t>> overlaps;
  std::uint64_t candidate_pairs = 0;   // |source| x |target|
  std::uint64_t zero_weight_pairs = 0;
};

CandidatePairs compute_candidate_pairs(const CrossDomainSystem& sys, double alpha,
                                       std::uint64_t pair_cap);

/// Highway structure plus one undirected user-user edge per candidate pair
/// with positive weight (kind = Superhighway).
TrainingStructure materialize_superhighway(const CrossDomainSystem& sys,
                                           const CandidatePairs& pairs, double beta);

TrainingStructure construct_superhighway(const CrossDomainSystem& sys,
                                         const ConstructionParams& params);

}  // namespace shx
