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
#include <string>
#include <utility>
#include <vector>

#include "shx/embed.hpp"
#include "shx/eval.hpp"
#include "shx/graph.hpp"

namespace shx {

/// Schema version stamped into every artifact file. Loading a file whose
/// version differs raises VersionMismatch so stale intermediates fail
/// loudly.
inline constexpr int kArtifactVersion = 1;

// Training structures. Text format: a magic+version line, a one-line JSON
// header (kind, provenance, counts), node labels in row order, then one
// `i j w` line per edge with i < j.
void save_structure(const TrainingStructure& s, const std::string& path);
TrainingStructure load_structure(const std::string& path);

// Embedding models. `<node_count> <dims>` header then `ns:key v1 .. vdims`
// per node (word2vec-compatible text layout). Trainer tag, seed, and the
// training-structure context travel in a `<path>.meta.json` sidecar since
// the vector format has no room for them.
void save_model(const EmbeddingModel& m, const std::string& path,
                const ConfigEcho* context = nullptr);
EmbeddingModel load_model(const std::string& path);

/// Reconstructs the report config echo from a model's meta sidecar.
/// Missing sidecar or missing context fields leave the echo defaulted.
ConfigEcho load_model_context(const std::string& path);

void save_split(const EvalSplit& s, const std::string& path);
EvalSplit load_split(const std::string& path);

std::string report_to_json(const EvalReport& r);
void save_report(const EvalReport& r, const std::string& path);
EvalReport load_report(const std::string& path);

std::string grid_to_json(const GridResult& g);
void save_grid(const GridResult& g, const std::string& path);

/// Plain-text comparison across runs: one row per training structure, one
/// column per backend, MAP rendered as a percentage. Reports landing in
/// the same cell (several seeds) are averaged.
std::string render_comparison_table(const std::vector<EvalReport>& reports);

/// FNV-1a 64 over the raw file bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

struct ManifestEntry {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// Appends one JSON line per pipeline stage; input/output digests are
/// computed here so every artifact is traceable to the command that made
/// it.
void append_manifest(const std::string& manifest_path, const ManifestEntry& e);

}  // namespace shx
