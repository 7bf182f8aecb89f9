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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shx/construct.hpp"
#include "shx/embed.hpp"
#include "shx/graph.hpp"

namespace shx {

enum class Similarity { Cosine, Dot };

std::string_view to_string(Similarity s);
Similarity similarity_from_string(std::string_view s);

struct UserSplit {
  std::vector<NodeId> train;   // sorted
  std::vector<NodeId> held;    // sorted, disjoint from train

  friend bool operator==(const UserSplit&, const UserSplit&) = default;
};

/// Per-user holdout partition of one domain's interactions. Holds
/// everything `evaluate` needs, so a split can round-trip through a file
/// and be replayed against any model.
struct EvalSplit {
  DomainTag domain = DomainTag::Target;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 1;
  std::map<NodeId, UserSplit> users;               // eligible users only
  std::vector<NodeId> pool;                        // post-split domain items, sorted
  std::map<NodeId, std::uint32_t> item_degrees;    // training degree per pool item

  friend bool operator==(const EvalSplit&, const EvalSplit&) = default;
};

/// Removes a per-user fraction of the chosen domain's edges and returns
/// the reduced system (used for structure building) together with the
/// split record. Users with < 2 interactions are ineligible and keep all
/// edges; eligible users hold out round(fraction x degree) items, clamped
/// to [1, degree - 1].
std::pair<CrossDomainSystem, EvalSplit> split(const CrossDomainSystem& sys,
                                              double holdout_fraction, std::uint64_t seed,
                                              DomainTag domain = DomainTag::Target);

/// AP@k = (sum over hit ranks i <= k of precision@i) / min(|relevant|, k).
/// Returns 0 when relevant is empty; duplicate ids in `ranked` raise
/// InvalidRanking.
double average_precision_at_k(const std::vector<NodeId>& ranked,
                              const std::set<NodeId>& relevant, int k);

enum class QueryMode { TopDegree, AllItems };

struct ConfigEcho {
  std::string structure;    // training structure kind
  double alpha = 0.0;
  double beta = 0.0;
  std::string model;        // backend name
  std::uint64_t seed = 0;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct QueryResult {
  NodeId user;
  NodeId query;
  double average_precision = 0.0;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

struct EvalReport {
  double map_at_k = 0.0;
  int k = 10;
  std::vector<QueryResult> per_query;
  std::size_t skipped_users = 0;    // eligible users with no scorable query/relevant pair
  std::size_t missing_items = 0;    // pool items absent from the model
  Similarity similarity = Similarity::Cosine;
  ConfigEcho config;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalOptions {
  int k = 10;
  Similarity similarity = Similarity::Cosine;
  QueryMode queries = QueryMode::TopDegree;
  ConfigEcho config;
};

/// Ranks the split's item pool against one query item per user (that
/// user's highest-degree training item, ties by NodeId) and reports MAP@k
/// over all (user, query) pairs. The pool excludes the querying user's own
/// training items; relevant = that user's held-out items. Pool items the
/// model does not cover are skipped and counted; above 5% missing raises
/// Coverage. Deterministic: no randomness is involved.
EvalReport evaluate(const EmbeddingModel& model, const EvalSplit& split,
                    const EvalOptions& opts = {});

/// Inclusive arithmetic progression enumerated by integer steps so the
/// values carry no accumulated floating-point drift.
struct GridRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.1;

  void validate() const;
  std::vector<double> values() const;

  static GridRange alpha_default() { return {0.1, 1.0, 0.1}; }   // 10 values
  static GridRange beta_default() { return {0.5, 1.5, 0.1}; }    // 11 values
};

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  bool ok = false;
  EvalReport report;    // meaningful when ok
  std::string error;    // set when !ok

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridOptions {
  int k = 10;
  double holdout_fraction = 0.2;
  DomainTag eval_domain = DomainTag::Target;
  Similarity similarity = Similarity::Cosine;
  TrainConfig train;
  std::uint64_t pair_cap = 100'000'000;
};

struct GridResult {
  std::vector<GridCell> cells;   // successes sorted by MAP descending, failures last
  int k = 10;
  DomainTag eval_domain = DomainTag::Target;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 1;
  std::string backend;
};

/// One holdout split, then construct + train + evaluate per (alpha, beta)
/// cell. Candidate sets are computed once per alpha and reused across the
/// beta sweep (beta only rescales weights). A failed cell is recorded with
/// its error message, not fatal.
GridResult grid_search(const CrossDomainSystem& sys, Backend backend, const GridRange& alphas,
                       const GridRange& betas, const GridOptions& opts = {});

}  // namespace shx
