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

#include "shx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shx/rng.hpp"

namespace shx {

std::string_view to_string(Similarity s) {
  return s == Similarity::Cosine ? "cosine" : "dot";
}

Similarity similarity_from_string(std::string_view s) {
  if (s == "cosine") return Similarity::Cosine;
  if (s == "dot") return Similarity::Dot;
  fail(ErrorCode::InvalidParam, "unknown similarity '" + std::string(s) + "'");
}

std::pair<CrossDomainSystem, EvalSplit> split(const CrossDomainSystem& sys,
                                              double holdout_fraction, std::uint64_t seed,
                                              DomainTag domain) {
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0)) {
    fail(ErrorCode::InvalidParam, "holdout_fraction must be in (0, 1)");
  }

  const DomainGraph& dg = sys.domain(domain);
  EvalSplit out;
  out.domain = domain;
  out.holdout_fraction = holdout_fraction;
  out.seed = seed;

  std::vector<EdgeRec> train_edges;
  train_edges.reserve(dg.edge_count());

  for (const NodeId& user : dg.users()) {
    const auto nbrs = dg.graph().neighbors(user);
    const std::size_t deg = nbrs.size();
    if (deg < 2) {
      for (const auto& [item, w] : nbrs) train_edges.push_back({user, item, w});
      continue;
    }
    const auto held_count = static_cast<std::size_t>(std::clamp<long long>(
        std::llround(holdout_fraction * static_cast<double>(deg)), 1,
        static_cast<long long>(deg) - 1));

    std::vector<std::size_t> order(deg);
    for (std::size_t i = 0; i < deg; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "split:" + user.label()));
    rng.shuffle(order);

    UserSplit us;
    for (std::size_t i = 0; i < deg; ++i) {
      const auto& [item, w] = nbrs[order[i]];
      if (i < held_count) {
        us.held.push_back(item);
      } else {
        us.train.push_back(item);
        train_edges.push_back({user, item, w});
      }
    }
    std::sort(us.train.begin(), us.train.end());
    std::sort(us.held.begin(), us.held.end());
    out.users.emplace(user, std::move(us));
  }
  if (out.users.empty()) {
    fail(ErrorCode::EmptyEvalSet, "no user has the >= 2 interactions evaluation needs");
  }

  DomainGraph reduced = DomainGraph::build(domain, std::move(train_edges));
  CrossDomainSystem post = domain == DomainTag::Target
                               ? CrossDomainSystem(sys.source(), std::move(reduced))
                               : CrossDomainSystem(std::move(reduced), sys.target());

  const DomainGraph& post_dg = post.domain(domain);
  out.pool = post_dg.items();
  for (const NodeId& item : out.pool) {
    out.item_degrees[item] =
        static_cast<std::uint32_t>(post_dg.graph().degree(*post_dg.graph().index_of(item)));
  }
  return {std::move(post), std::move(out)};
}

double average_precision_at_k(const std::vector<NodeId>& ranked,
                              const std::set<NodeId>& relevant, int k) {
  if (k < 1) fail(ErrorCode::InvalidParam, "k must be >= 1");
  {
    std::set<NodeId> seen;
    for (const NodeId& id : ranked) {
      if (!seen.insert(id).second) {
        fail(ErrorCode::InvalidRanking, "duplicate entry " + id.label() + " in ranking");
      }
    }
  }
  if (relevant.empty()) return 0.0;

  const std::size_t cutoff = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < cutoff; ++i) {
    if (relevant.count(ranked[i]) > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  const auto denom = std::min<std::size_t>(relevant.size(), static_cast<std::size_t>(k));
  return sum / static_cast<double>(denom);
}

namespace {

double similarity_score(std::span<const double> a, std::span<const double> b, Similarity sim) {
  double dot = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
  if (sim == Similarity::Dot) return dot;
  double na = 0.0, nb = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    na += a[d] * a[d];
    nb += b[d] * b[d];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Top-k pool items by similarity to the query vector, excluding the
/// user's own training items. Ties break toward the smaller NodeId.
std::vector<NodeId> rank_pool(const EmbeddingModel& model,
                              const std::vector<std::size_t>& pool_rows,
                              const std::vector<NodeId>& exclude, std::size_t query_row,
                              Similarity sim, int k) {
  const auto query_vec = model.vector_at(query_row);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pool_rows.size());
  for (std::size_t row : pool_rows) {
    if (row == query_row) continue;
    const NodeId& id = model.node_at(row);
    if (std::binary_search(exclude.begin(), exclude.end(), id)) continue;
    scored.emplace_back(similarity_score(query_vec, model.vector_at(row), sim), row);
  }
  const auto better = [&model](const std::pair<double, std::size_t>& a,
                               const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return model.node_at(a.second) < model.node_at(b.second);
  };
  const std::size_t top = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + top, scored.end(), better);

  std::vector<NodeId> ranked;
  ranked.reserve(top);
  for (std::size_t i = 0; i < top; ++i) ranked.push_back(model.node_at(scored[i].second));
  return ranked;
}

}  // namespace

EvalReport evaluate(const EmbeddingModel& model, const EvalSplit& split,
                    const EvalOptions& opts) {
  if (opts.k < 1) fail(ErrorCode::InvalidParam, "k must be >= 1");
  if (split.pool.empty()) fail(ErrorCode::EmptyEvalSet, "split has an empty item pool");

  EvalReport report;
  report.k = opts.k;
  report.similarity = opts.similarity;
  report.config = opts.config;

  std::vector<std::size_t> pool_rows;
  std::vector<NodeId> covered;
  pool_rows.reserve(split.pool.size());
  covered.reserve(split.pool.size());
  for (const NodeId& item : split.pool) {
    if (model.contains(item)) {
      pool_rows.push_back(model.row_of(item));
      covered.push_back(item);
    } else {
      ++report.missing_items;
    }
  }
  const double missing_share =
      static_cast<double>(report.missing_items) / static_cast<double>(split.pool.size());
  if (missing_share > 0.05) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f%%", missing_share * 100.0);
    fail(ErrorCode::Coverage, "model is missing " + std::string(buf) +
                                  " of the item pool; structure/model mismatch");
  }

  for (const auto& [user, us] : split.users) {
    std::vector<NodeId> queries;
    if (opts.queries == QueryMode::AllItems) {
      for (const NodeId& item : us.train) {
        if (model.contains(item)) queries.push_back(item);
      }
    } else {
      std::uint32_t best_deg = 0;
      const NodeId* best = nullptr;
      for (const NodeId& item : us.train) {
        if (!model.contains(item)) continue;
        const auto it = split.item_degrees.find(item);
        const std::uint32_t deg = it == split.item_degrees.end() ? 0 : it->second;
        if (best == nullptr || deg > best_deg || (deg == best_deg && item < *best)) {
          best = &item;
          best_deg = deg;
        }
      }
      if (best != nullptr) queries.push_back(*best);
    }

    std::set<NodeId> relevant;
    for (const NodeId& item : us.held) {
      if (std::binary_search(covered.begin(), covered.end(), item)) relevant.insert(item);
    }
    if (queries.empty() || relevant.empty()) {
      ++report.skipped_users;
      continue;
    }
    for (const NodeId& query : queries) {
      const std::vector<NodeId> ranked =
          rank_pool(model, pool_rows, us.train, model.row_of(query), opts.similarity, opts.k);
      report.per_query.push_back(
          {user, query, average_precision_at_k(ranked, relevant, opts.k)});
    }
  }

  if (report.per_query.empty()) {
    fail(ErrorCode::EmptyEvalSet, "every user was skipped; nothing to evaluate");
  }
  double sum = 0.0;
  for (const QueryResult& q : report.per_query) sum += q.average_precision;
  report.map_at_k = sum / static_cast<double>(report.per_query.size());
  return report;
}

void GridRange::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorCode::InvalidParam, "step must be > 0");
  if (!(start <= stop)) fail(ErrorCode::InvalidParam, "range start must be <= stop");
}

std::vector<double> GridRange::values() const {
  validate();
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
  }
  return vals;
}

GridResult grid_search(const CrossDomainSystem& sys, Backend backend, const GridRange& alphas,
                       const GridRange& betas, const GridOptions& opts) {
  alphas.validate();
  betas.validate();
  opts.train.validate();

  GridResult result;
  result.k = opts.k;
  result.eval_domain = opts.eval_domain;
  result.holdout_fraction = opts.holdout_fraction;
  result.seed = opts.train.seed;
  result.backend = std::string(to_string(backend));

  auto [post, esplit] = split(sys, opts.holdout_fraction, opts.train.seed, opts.eval_domain);

  for (double alpha : alphas.values()) {
    CandidatePairs pairs;
    std::string alpha_error;
    try {
      pairs = compute_candidate_pairs(post, alpha, opts.pair_cap);
    } catch (const Error& e) {
      alpha_error = e.what();
    }
    for (double beta : betas.values()) {
      GridCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      if (!alpha_error.empty()) {
        cell.error = alpha_error;
        result.cells.push_back(std::move(cell));
        continue;
      }
      try {
        const TrainingStructure ts = materialize_superhighway(post, pairs, beta);
        const EmbeddingModel model = train(ts, backend, opts.train);
        EvalOptions eopts;
        eopts.k = opts.k;
        eopts.similarity = opts.similarity;
        eopts.config = {std::string(to_string(StructureKind::Superhighway)), alpha, beta,
                        std::string(to_string(backend)), opts.train.seed};
        cell.report = evaluate(model, esplit, eopts);
        cell.ok = true;
      } catch (const Error& e) {
        cell.error = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }

  std::stable_sort(result.cells.begin(), result.cells.end(),
                   [](const GridCell& a, const GridCell& b) {
                     if (a.ok != b.ok) return a.ok;
                     if (a.ok && a.report.map_at_k != b.report.map_at_k) {
                       return a.report.map_at_k > b.report.map_at_k;
                     }
                     if (a.alpha != b.alpha) return a.alpha < b.alpha;
                     return a.beta < b.beta;
                   });
  return result;
}

}  // namespace shx
