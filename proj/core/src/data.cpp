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

#include "shx/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shx/rng.hpp"

namespace shx {

namespace {

bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\r\n\f\v") != std::string_view::npos;
}

std::string fmt_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace

DomainGraph ingest_domain(const std::filesystem::path& path, DomainTag tag,
                          const IngestOptions& opts, IngestLog* log) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());

  IngestLog local;
  IngestLog& lg = log ? *log : local;

  // (user, item) -> max weight over duplicate lines
  std::map<std::pair<std::string, std::string>, double> edges;

  std::string line;
  std::size_t lineno = 0;
  auto bad_line = [&](const std::string& reason) {
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    if (opts.skip_bad_lines) {
      ++lg.bad_lines_skipped;
      lg.warnings.push_back(where + ": skipped (" + reason + ")");
      return;
    }
    fail(ErrorCode::Ingest, where + ": " + reason);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++lg.lines;

    const auto t1 = line.find('\t');
    if (t1 == std::string::npos) {
      bad_line("expected user<TAB>item");
      continue;
    }
    const auto t2 = line.find('\t', t1 + 1);
    std::string user = line.substr(0, t1);
    std::string item =
        t2 == std::string::npos ? line.substr(t1 + 1) : line.substr(t1 + 1, t2 - t1 - 1);
    if (user.empty() || item.empty() || has_whitespace(user) || has_whitespace(item)) {
      bad_line("empty or whitespace-bearing key");
      continue;
    }

    double weight = 1.0;
    if (t2 != std::string::npos && opts.use_weights) {
      const std::string field = line.substr(t2 + 1);
      std::size_t consumed = 0;
      try {
        weight = std::stod(field, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != field.size() || !std::isfinite(weight) || weight <= 0.0) {
        bad_line("bad weight '" + field + "'");
        continue;
      }
    }

    auto key = std::make_pair(std::move(user), std::move(item));
    auto [it, inserted] = edges.emplace(std::move(key), weight);
    if (!inserted) {
      ++lg.duplicates_collapsed;
      lg.warnings.push_back(path.filename().string() + ":" + std::to_string(lineno) +
                            ": duplicate pair " + it->first.first + "/" + it->first.second +
                            " collapsed (max weight kept)");
      it->second = std::max(it->second, weight);
    }
  }

  if (edges.empty()) {
    fail(ErrorCode::EmptyDomain, path.string() + " contains no interactions");
  }

  std::vector<EdgeRec> recs;
  recs.reserve(edges.size());
  for (const auto& [uk, w] : edges) {
    recs.push_back({NodeId::user(tag, uk.first), NodeId::item(uk.second), w});
  }
  lg.edges = recs.size();
  return DomainGraph::build(tag, std::move(recs));
}

CrossDomainSystem ingest(const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path, const IngestOptions& opts,
                         IngestLog* source_log, IngestLog* target_log) {
  DomainGraph source = ingest_domain(source_path, DomainTag::Source, opts, source_log);
  DomainGraph target = ingest_domain(target_path, DomainTag::Target, opts, target_log);
  CrossDomainSystem sys(std::move(source), std::move(target));
  validate(sys);
  return sys;
}

void export_tsv(const DomainGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  const Graph& gr = g.graph();
  for (NodeIndex i = 0; i < gr.node_count(); ++i) {
    const NodeId& u = gr.node_at(i);
    if (!u.is_user()) continue;
    for (const auto& n : gr.adjacency(i)) {
      out << u.key << '\t' << gr.node_at(n.node).key << '\t' << fmt_weight(n.weight) << '\n';
    }
  }
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

std::size_t SynthConfig::shared_item_count() const {
  return static_cast<std::size_t>(std::llround(overlap_ratio * static_cast<double>(items_target)));
}

void SynthConfig::validate() const {
  if (users_source == 0 || users_target == 0 || items_source == 0 || items_target == 0) {
    fail(ErrorCode::InvalidParam, "all user/item counts must be positive");
  }
  if (overlap_ratio < 0.0 || overlap_ratio > 1.0) {
    fail(ErrorCode::InvalidParam, "overlap_ratio must be in [0, 1]");
  }
  if (latent_dims == 0) fail(ErrorCode::InvalidParam, "latent_dims must be positive");
  if (!(interactions_per_user >= 1.0)) {
    fail(ErrorCode::InvalidParam, "interactions_per_user must be >= 1");
  }
  if (interactions_per_user_target < 0.0) {
    fail(ErrorCode::InvalidParam, "interactions_per_user_target must be >= 0");
  }
  if (noise < 0.0 || !std::isfinite(noise)) fail(ErrorCode::InvalidParam, "noise must be >= 0");
  if (shared_item_count() > std::min(items_source, items_target)) {
    fail(ErrorCode::InvalidParam, "shared-item count exceeds a domain catalog");
  }
  if (interactions_per_user > static_cast<double>(items_source) ||
      target_mean() > static_cast<double>(items_target)) {
    fail(ErrorCode::InvalidParam, "interactions_per_user exceeds the item catalog");
  }
}

namespace {

std::vector<double> draw_latent(Rng& rng, std::size_t dims) {
  std::vector<double> v(dims);
  for (auto& x : v) x = rng.gaussian();
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// 1 + geometric draw, so every user gets at least one interaction.
std::size_t draw_interaction_count(Rng& rng, double mean, std::size_t catalog) {
  std::size_t n = 1;
  if (mean > 1.0) {
    const double p = 1.0 / mean;  // mean of 1+Geom(p) is 1/p
    n = 1 + static_cast<std::size_t>(rng.geometric(p));
  }
  return std::min(n, catalog);
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();

  SynthResult out;
  out.latent_dims = cfg.latent_dims;

  const std::size_t shared = cfg.shared_item_count();
  char buf[32];

  // Item catalogs. A shared item carries one id and one latent vector in
  // both domains.
  std::vector<NodeId> source_items, target_items;
  Rng item_rng(derive_seed(cfg.seed, "synth-items"));
  for (std::size_t i = 0; i < shared; ++i) {
    std::snprintf(buf, sizeof(buf), "sh%05zu", i);
    NodeId id = NodeId::item(buf);
    out.latents[id] = draw_latent(item_rng, cfg.latent_dims);
    source_items.push_back(id);
    target_items.push_back(std::move(id));
  }
  for (std::size_t i = 0; i < cfg.items_source - shared; ++i) {
    std::snprintf(buf, sizeof(buf), "s%05zu", i);
    NodeId id = NodeId::item(buf);
    out.latents[id] = draw_latent(item_rng, cfg.latent_dims);
    source_items.push_back(std::move(id));
  }
  for (std::size_t i = 0; i < cfg.items_target - shared; ++i) {
    std::snprintf(buf, sizeof(buf), "t%05zu", i);
    NodeId id = NodeId::item(buf);
    out.latents[id] = draw_latent(item_rng, cfg.latent_dims);
    target_items.push_back(std::move(id));
  }

  auto build_domain = [&](DomainTag tag, std::size_t user_count,
                          const std::vector<NodeId>& items, double mean) {
    Rng rng(derive_seed(cfg.seed, tag == DomainTag::Source ? "synth-source" : "synth-target"));
    std::vector<EdgeRec> edges;
    std::vector<std::pair<double, std::size_t>> scores(items.size());
    for (std::size_t u = 0; u < user_count; ++u) {
      std::snprintf(buf, sizeof(buf), "u%05zu", u);
      NodeId user = NodeId::user(tag, buf);
      const auto latent = draw_latent(rng, cfg.latent_dims);
      const std::size_t count = draw_interaction_count(rng, mean, items.size());
      for (std::size_t i = 0; i < items.size(); ++i) {
        double s = dot(latent, out.latents.at(items[i]));
        if (cfg.noise > 0.0) s += cfg.noise * rng.gaussian();
        scores[i] = {s, i};
      }
      std::partial_sort(scores.begin(), scores.begin() + count, scores.end(),
                        [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                        });
      for (std::size_t k = 0; k < count; ++k) {
        edges.push_back({user, items[scores[k].second], 1.0});
      }
      out.latents[user] = latent;
    }
    return DomainGraph::build(tag, std::move(edges));
  };

  DomainGraph source =
      build_domain(DomainTag::Source, cfg.users_source, source_items, cfg.interactions_per_user);
  DomainGraph target =
      build_domain(DomainTag::Target, cfg.users_target, target_items, cfg.target_mean());
  out.sys = CrossDomainSystem(std::move(source), std::move(target));
  validate(out.sys);
  return out;
}

}  // namespace shx
