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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shx/graph.hpp"

namespace shx {

struct IngestOptions {
  bool use_weights = false;     // default binarizes: any interaction -> 1.0
  bool skip_bad_lines = false;  // fail fast unless set
};

struct IngestLog {
  std::size_t lines = 0;
  std::size_t edges = 0;
  std::size_t duplicates_collapsed = 0;
  std::size_t bad_lines_skipped = 0;
  std::vector<std::string> warnings;
};

/// Reads one domain from tab-separated `user<TAB>item[<TAB>weight]` lines.
/// `#`-prefixed lines are comments. Duplicate pairs collapse to one edge
/// keeping the max weight.
DomainGraph ingest_domain(const std::filesystem::path& path, DomainTag tag,
                          const IngestOptions& opts, IngestLog* log = nullptr);

CrossDomainSystem ingest(const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path, const IngestOptions& opts,
                         IngestLog* source_log = nullptr, IngestLog* target_log = nullptr);

/// Writes a domain back out in the same TSV format (always three columns).
void export_tsv(const DomainGraph& g, const std::filesystem::path& path);

struct SynthConfig {
  std::size_t users_source = 100;
  std::size_t users_target = 50;
  std::size_t items_source = 80;
  std::size_t items_target = 60;
  double overlap_ratio = 0.5;            // fraction of target items shared with source
  std::size_t latent_dims = 8;
  double interactions_per_user = 10;     // mean of the per-user geometric draw (source)
  double interactions_per_user_target = 0;  // 0 = same as source
  double noise = 0.1;
  std::uint64_t seed = 1;

  double target_mean() const {
    return interactions_per_user_target > 0 ? interactions_per_user_target
                                            : interactions_per_user;
  }
  std::size_t shared_item_count() const;
  void validate() const;
};

/// Generated system plus the ground-truth latent vectors. The latents are
/// diagnostics only and must never reach a trainer.
struct SynthResult {
  CrossDomainSystem sys;
  std::size_t latent_dims = 0;
  std::map<NodeId, std::vector<double>> latents;
};

/// Users and items draw latent vectors from a spherical Gaussian; each user
/// interacts with their top-similarity items perturbed by noise. Shared
/// items keep one latent vector across domains, which is the transferable
/// signal. Deterministic under seed.
SynthResult generate_synthetic(const SynthConfig& cfg);

}  // namespace shx
