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

#include "shx/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "shx/rng.hpp"

namespace shx {
namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path + " for reading");
  return in;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::Io, path + ": malformed number '" + s + "'");
  }
}

ordered_json parse_json_text(const std::string& text, const std::string& path) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::Io, path + ": malformed JSON");
  return j;
}

ordered_json load_json_artifact(const std::string& path, const std::string& kind) {
  std::ifstream in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  ordered_json j = parse_json_text(buf.str(), path);
  if (!j.is_object() || j.value("artifact", "") != kind) {
    fail(ErrorCode::VersionMismatch, path + ": not a " + kind + " artifact");
  }
  if (j.value("version", -1) != kArtifactVersion) {
    fail(ErrorCode::VersionMismatch,
         path + ": artifact version " + j.value("version", ordered_json()).dump() +
             ", expected " + std::to_string(kArtifactVersion));
  }
  return j;
}

ordered_json json_header(const std::string& kind) {
  ordered_json j;
  j["artifact"] = kind;
  j["version"] = kArtifactVersion;
  return j;
}

}  // namespace

void save_structure(const TrainingStructure& s, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "SHX-STRUCTURE " << kArtifactVersion << "\n";

  ordered_json header;
  header["kind"] = std::string(to_string(s.kind));
  header["nodes"] = s.graph.node_count();
  header["edges"] = s.graph.edge_count();
  ordered_json prov;
  prov["alpha"] = s.provenance.alpha;
  prov["beta"] = s.provenance.beta;
  prov["candidates_source"] = s.provenance.candidates_source;
  prov["candidates_target"] = s.provenance.candidates_target;
  prov["candidate_pairs"] = s.provenance.candidate_pairs;
  prov["edges_added"] = s.provenance.edges_added;
  prov["zero_weight_pairs"] = s.provenance.zero_weight_pairs;
  header["provenance"] = std::move(prov);
  out << header.dump() << "\n";

  for (const NodeId& id : s.graph.nodes()) out << id.label() << "\n";
  for (NodeIndex i = 0; i < s.graph.node_count(); ++i) {
    for (const Neighbor& n : s.graph.adjacency(i)) {
      if (n.node > i) out << i << " " << n.node << " " << fmt_double(n.weight) << "\n";
    }
  }
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

TrainingStructure load_structure(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": empty file");
  {
    std::istringstream magic(line);
    std::string tag;
    int version = -1;
    magic >> tag >> version;
    if (tag != "SHX-STRUCTURE") {
      fail(ErrorCode::VersionMismatch, path + ": not a structure file");
    }
    if (version != kArtifactVersion) {
      fail(ErrorCode::VersionMismatch, path + ": structure version " +
                                           std::to_string(version) + ", expected " +
                                           std::to_string(kArtifactVersion));
    }
  }
  if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": missing header");
  const ordered_json header = parse_json_text(line, path);

  TrainingStructure s;
  s.kind = structure_kind_from_string(header.value("kind", ""));
  const auto& prov = header.at("provenance");
  s.provenance.alpha = prov.value("alpha", 0.0);
  s.provenance.beta = prov.value("beta", 0.0);
  s.provenance.candidates_source = prov.value("candidates_source", std::uint64_t{0});
  s.provenance.candidates_target = prov.value("candidates_target", std::uint64_t{0});
  s.provenance.candidate_pairs = prov.value("candidate_pairs", std::uint64_t{0});
  s.provenance.edges_added = prov.value("edges_added", std::uint64_t{0});
  s.provenance.zero_weight_pairs = prov.value("zero_weight_pairs", std::uint64_t{0});

  const auto node_count = header.value("nodes", std::size_t{0});
  const auto edge_count = header.value("edges", std::size_t{0});
  std::vector<NodeId> nodes;
  nodes.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": truncated node list");
    nodes.push_back(NodeId::from_label(line));
  }

  std::vector<EdgeRec> edges;
  edges.reserve(edge_count);
  std::vector<bool> touched(node_count, false);
  for (std::size_t e = 0; e < edge_count; ++e) {
    if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": truncated edge list");
    std::istringstream row(line);
    std::size_t i = 0, j = 0;
    std::string w;
    if (!(row >> i >> j >> w) || i >= node_count || j >= node_count) {
      fail(ErrorCode::Io, path + ": malformed edge line '" + line + "'");
    }
    touched[i] = touched[j] = true;
    edges.push_back({nodes[i], nodes[j], parse_double(w, path)});
  }
  std::vector<NodeId> isolated;
  for (std::size_t i = 0; i < node_count; ++i) {
    if (!touched[i]) isolated.push_back(nodes[i]);
  }
  s.graph = Graph::build(std::move(edges), std::move(isolated));
  return s;
}

void save_model(const EmbeddingModel& m, const std::string& path, const ConfigEcho* context) {
  {
    std::ofstream out = open_out(path);
    out << m.node_count() << " " << m.dims() << "\n";
    for (std::size_t row = 0; row < m.node_count(); ++row) {
      out << m.node_at(row).label();
      for (double v : m.vector_at(row)) out << " " << fmt_double(v);
      out << "\n";
    }
    if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
  }
  ordered_json meta = json_header("model-meta");
  meta["trainer"] = std::string(to_string(m.trainer()));
  meta["seed"] = m.seed();
  meta["dims"] = m.dims();
  meta["nodes"] = m.node_count();
  if (context != nullptr) {
    ordered_json ctx;
    ctx["structure"] = context->structure;
    ctx["alpha"] = context->alpha;
    ctx["beta"] = context->beta;
    meta["context"] = std::move(ctx);
  }
  std::ofstream mout = open_out(path + ".meta.json");
  mout << meta.dump(2) << "\n";
}

EmbeddingModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": empty file");
  std::size_t node_count = 0;
  int dims = 0;
  {
    std::istringstream header(line);
    if (!(header >> node_count >> dims) || dims <= 0) {
      fail(ErrorCode::Io, path + ": malformed model header '" + line + "'");
    }
  }

  Backend trainer = Backend::MF;
  std::uint64_t seed = 0;
  {
    std::ifstream meta_in(path + ".meta.json", std::ios::binary);
    if (meta_in) {
      std::stringstream buf;
      buf << meta_in.rdbuf();
      const ordered_json meta = parse_json_text(buf.str(), path + ".meta.json");
      if (meta.value("artifact", "") != "model-meta" ||
          meta.value("version", -1) != kArtifactVersion) {
        fail(ErrorCode::VersionMismatch, path + ".meta.json: not a model-meta artifact");
      }
      trainer = backend_from_string(meta.value("trainer", "mf"));
      seed = meta.value("seed", std::uint64_t{0});
    }
  }

  std::vector<NodeId> nodes;
  nodes.reserve(node_count);
  std::vector<std::vector<double>> rows;
  rows.reserve(node_count);
  for (std::size_t r = 0; r < node_count; ++r) {
    if (!std::getline(in, line)) fail(ErrorCode::Io, path + ": truncated vector list");
    std::istringstream row(line);
    std::string label;
    if (!(row >> label)) fail(ErrorCode::Io, path + ": malformed vector line");
    nodes.push_back(NodeId::from_label(label));
    std::vector<double> vec(static_cast<std::size_t>(dims));
    std::string tok;
    for (int d = 0; d < dims; ++d) {
      if (!(row >> tok)) fail(ErrorCode::Io, path + ": vector row shorter than dims");
      vec[static_cast<std::size_t>(d)] = parse_double(tok, path);
    }
    rows.push_back(std::move(vec));
  }

  EmbeddingModel m(std::move(nodes), dims, trainer, seed);
  for (std::size_t r = 0; r < m.node_count(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), m.mutable_vector_at(r).begin());
  }
  return m;
}

ConfigEcho load_model_context(const std::string& path) {
  ConfigEcho echo;
  std::ifstream meta_in(path + ".meta.json", std::ios::binary);
  if (!meta_in) return echo;
  std::stringstream buf;
  buf << meta_in.rdbuf();
  const ordered_json meta = parse_json_text(buf.str(), path + ".meta.json");
  echo.model = meta.value("trainer", "");
  echo.seed = meta.value("seed", std::uint64_t{0});
  if (meta.contains("context")) {
    const auto& ctx = meta.at("context");
    echo.structure = ctx.value("structure", "");
    echo.alpha = ctx.value("alpha", 0.0);
    echo.beta = ctx.value("beta", 0.0);
  }
  return echo;
}

void save_split(const EvalSplit& s, const std::string& path) {
  ordered_json j = json_header("split");
  j["domain"] = std::string(to_string(s.domain));
  j["holdout_fraction"] = s.holdout_fraction;
  j["seed"] = s.seed;
  ordered_json users = ordered_json::object();
  for (const auto& [user, us] : s.users) {
    ordered_json rec;
    ordered_json train = ordered_json::array();
    for (const NodeId& id : us.train) train.push_back(id.label());
    ordered_json held = ordered_json::array();
    for (const NodeId& id : us.held) held.push_back(id.label());
    rec["train"] = std::move(train);
    rec["held"] = std::move(held);
    users[user.label()] = std::move(rec);
  }
  j["users"] = std::move(users);
  ordered_json pool = ordered_json::array();
  for (const NodeId& id : s.pool) pool.push_back(id.label());
  j["pool"] = std::move(pool);
  ordered_json degrees = ordered_json::object();
  for (const auto& [item, deg] : s.item_degrees) degrees[item.label()] = deg;
  j["degrees"] = std::move(degrees);

  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

EvalSplit load_split(const std::string& path) {
  const ordered_json j = load_json_artifact(path, "split");
  EvalSplit s;
  s.domain = domain_tag_from_string(j.value("domain", ""));
  s.holdout_fraction = j.value("holdout_fraction", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  for (const auto& [label, rec] : j.at("users").items()) {
    UserSplit us;
    for (const auto& t : rec.at("train")) us.train.push_back(NodeId::from_label(t.get<std::string>()));
    for (const auto& h : rec.at("held")) us.held.push_back(NodeId::from_label(h.get<std::string>()));
    s.users.emplace(NodeId::from_label(label), std::move(us));
  }
  for (const auto& p : j.at("pool")) s.pool.push_back(NodeId::from_label(p.get<std::string>()));
  for (const auto& [label, deg] : j.at("degrees").items()) {
    s.item_degrees.emplace(NodeId::from_label(label), deg.get<std::uint32_t>());
  }
  return s;
}

namespace {

ordered_json report_to_json_value(const EvalReport& r) {
  ordered_json j = json_header("report");
  j["map_at_k"] = r.map_at_k;
  j["k"] = r.k;
  j["similarity"] = std::string(to_string(r.similarity));
  j["skipped_users"] = r.skipped_users;
  j["missing_items"] = r.missing_items;
  ordered_json cfg;
  cfg["structure"] = r.config.structure;
  cfg["alpha"] = r.config.alpha;
  cfg["beta"] = r.config.beta;
  cfg["model"] = r.config.model;
  cfg["seed"] = r.config.seed;
  j["config"] = std::move(cfg);
  ordered_json pq = ordered_json::array();
  for (const QueryResult& q : r.per_query) {
    ordered_json rec;
    rec["user"] = q.user.label();
    rec["query"] = q.query.label();
    rec["ap"] = q.average_precision;
    pq.push_back(std::move(rec));
  }
  j["per_query"] = std::move(pq);
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& r) { return report_to_json_value(r).dump(2); }

void save_report(const EvalReport& r, const std::string& path) {
  std::ofstream out = open_out(path);
  out << report_to_json(r) << "\n";
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

EvalReport load_report(const std::string& path) {
  const ordered_json j = load_json_artifact(path, "report");
  EvalReport r;
  r.map_at_k = j.value("map_at_k", 0.0);
  r.k = j.value("k", 0);
  r.similarity = similarity_from_string(j.value("similarity", "cosine"));
  r.skipped_users = j.value("skipped_users", std::size_t{0});
  r.missing_items = j.value("missing_items", std::size_t{0});
  const auto& cfg = j.at("config");
  r.config.structure = cfg.value("structure", "");
  r.config.alpha = cfg.value("alpha", 0.0);
  r.config.beta = cfg.value("beta", 0.0);
  r.config.model = cfg.value("model", "");
  r.config.seed = cfg.value("seed", std::uint64_t{0});
  for (const auto& rec : j.at("per_query")) {
    r.per_query.push_back({NodeId::from_label(rec.value("user", "")),
                           NodeId::from_label(rec.value("query", "")),
                           rec.value("ap", 0.0)});
  }
  return r;
}

std::string grid_to_json(const GridResult& g) {
  ordered_json j = json_header("grid");
  j["k"] = g.k;
  j["eval_domain"] = std::string(to_string(g.eval_domain));
  j["holdout_fraction"] = g.holdout_fraction;
  j["seed"] = g.seed;
  j["backend"] = g.backend;
  std::size_t failed = 0;
  ordered_json cells = ordered_json::array();
  for (const GridCell& c : g.cells) {
    ordered_json rec;
    rec["alpha"] = c.alpha;
    rec["beta"] = c.beta;
    rec["ok"] = c.ok;
    if (c.ok) {
      rec["map_at_k"] = c.report.map_at_k;
      rec["skipped_users"] = c.report.skipped_users;
      rec["missing_items"] = c.report.missing_items;
    } else {
      rec["error"] = c.error;
      ++failed;
    }
    cells.push_back(std::move(rec));
  }
  j["cell_count"] = g.cells.size();
  j["failed_cells"] = failed;
  j["cells"] = std::move(cells);
  return j.dump(2);
}

void save_grid(const GridResult& g, const std::string& path) {
  std::ofstream out = open_out(path);
  out << grid_to_json(g) << "\n";
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

std::string render_comparison_table(const std::vector<EvalReport>& reports) {
  const std::vector<std::string> structure_order = {"single", "pretrained", "highway",
                                                    "superhighway"};
  const std::vector<std::string> model_order = {"mf", "deepwalk", "hpe"};

  auto rank_of = [](const std::vector<std::string>& order, const std::string& name) {
    const auto it = std::find(order.begin(), order.end(), name);
    return it == order.end() ? order.size() : static_cast<std::size_t>(it - order.begin());
  };

  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> cells;
  for (const EvalReport& r : reports) {
    const std::string structure = r.config.structure.empty() ? "?" : r.config.structure;
    const std::string model = r.config.model.empty() ? "?" : r.config.model;
    if (std::find(rows.begin(), rows.end(), structure) == rows.end()) rows.push_back(structure);
    if (std::find(cols.begin(), cols.end(), model) == cols.end()) cols.push_back(model);
    auto& [sum, n] = cells[{structure, model}];
    sum += r.map_at_k;
    ++n;
  }
  auto by_rank = [&rank_of](const std::vector<std::string>& order) {
    return [&rank_of, &order](const std::string& a, const std::string& b) {
      const auto ra = rank_of(order, a), rb = rank_of(order, b);
      return ra != rb ? ra < rb : a < b;
    };
  };
  std::sort(rows.begin(), rows.end(), by_rank(structure_order));
  std::sort(cols.begin(), cols.end(), by_rank(model_order));

  std::size_t row_width = std::string("structure").size();
  for (const auto& r : rows) row_width = std::max(row_width, r.size());

  std::ostringstream header;
  header << "structure" << std::string(row_width - std::string("structure").size(), ' ');
  for (const auto& c : cols) {
    header << "  " << c << std::string(c.size() < 10 ? 10 - c.size() : 0, ' ');
  }
  std::ostringstream body;
  for (const auto& row : rows) {
    body << row << std::string(row_width - row.size(), ' ');
    for (const auto& col : cols) {
      const auto it = cells.find({row, col});
      std::string text = "-";
      if (it != cells.end()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f",
                      100.0 * it->second.first / static_cast<double>(it->second.second));
        text = buf;
      }
      body << "  " << text << std::string(text.size() < 10 ? 10 - text.size() : 0, ' ');
    }
    body << "\n";
  }
  return "MAP@k (%)\n" + header.str() + "\n" + body.str();
}

std::string file_digest(const std::string& path) {
  std::ifstream in = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a64({buf, static_cast<std::size_t>(in.gcount())}, h);
    if (in.eof()) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
  return hex;
}

void append_manifest(const std::string& manifest_path, const ManifestEntry& e) {
  ordered_json j;
  j["command"] = e.command;
  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : e.params) params[key] = value;
  j["params"] = std::move(params);
  ordered_json inputs = ordered_json::object();
  for (const std::string& path : e.inputs) inputs[path] = file_digest(path);
  j["inputs"] = std::move(inputs);
  ordered_json outputs = ordered_json::object();
  for (const std::string& path : e.outputs) outputs[path] = file_digest(path);
  j["outputs"] = std::move(outputs);
  j["seed"] = e.seed;
  j["wall_ms"] = e.wall_ms;

  std::ofstream out(manifest_path, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::Io, "cannot open " + manifest_path + " for appending");
  out << j.dump() << "\n";
  if (!out) fail(ErrorCode::Io, "write to " + manifest_path + " failed");
}

}  // namespace shx
