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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shx/construct.hpp"
#include "shx/data.hpp"
#include "shx/embed.hpp"
#include "shx/eval.hpp"
#include "shx/graph.hpp"
#include "shx/io.hpp"

namespace {

using shx::Error;
using shx::ErrorCode;
using ordered_json = nlohmann::ordered_json;

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

struct Globals {
  std::uint64_t seed = 1;
  std::string manifest = "shx_manifest.jsonl";
  bool no_manifest = false;
  int workers = 1;
};

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

void finish(const Globals& g, shx::ManifestEntry entry, const Stopwatch& watch) {
  if (g.no_manifest || g.manifest.empty()) return;
  entry.seed = g.seed;
  entry.wall_ms = watch.ms();
  shx::append_manifest(g.manifest, entry);
}

void print_warnings(const shx::IngestLog& log, const std::string& which) {
  for (const std::string& w : log.warnings) {
    std::cerr << "shx: warning: " << which << ": " << w << "\n";
  }
}

ordered_json stats_json(const shx::StatsReport& s) {
  ordered_json j;
  j["users"] = s.users;
  j["items"] = s.items;
  j["edges"] = s.edges;
  j["density"] = s.density;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) shx::fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) shx::fail(ErrorCode::Io, "write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string source, target, out;
  bool use_weights = false;
  bool skip_bad = false;
};

void run_ingest(const Globals& g, const IngestArgs& a) {
  Stopwatch watch;
  shx::IngestOptions opts{a.use_weights, a.skip_bad};
  shx::IngestLog slog, tlog;
  const shx::CrossDomainSystem sys = shx::ingest(a.source, a.target, opts, &slog, &tlog);
  print_warnings(slog, "source");
  print_warnings(tlog, "target");

  ordered_json j;
  j["source"] = stats_json(shx::stats(sys.source()));
  j["target"] = stats_json(shx::stats(sys.target()));
  j["shared_items"] = sys.shared_items().size();
  j["source_lines"] = slog.lines;
  j["target_lines"] = tlog.lines;
  j["duplicates_collapsed"] = slog.duplicates_collapsed + tlog.duplicates_collapsed;
  j["bad_lines_skipped"] = slog.bad_lines_skipped + tlog.bad_lines_skipped;
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }

  shx::ManifestEntry entry;
  entry.command = "ingest";
  entry.params = {{"source", a.source}, {"target", a.target}};
  entry.inputs = {a.source, a.target};
  if (!a.out.empty()) entry.outputs = {a.out};
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string source_out, target_out;
  shx::SynthConfig cfg;
};

void run_synth(const Globals& g, SynthArgs& a) {
  Stopwatch watch;
  a.cfg.seed = g.seed;
  const shx::SynthResult result = shx::generate_synthetic(a.cfg);
  shx::export_tsv(result.sys.source(), a.source_out);
  shx::export_tsv(result.sys.target(), a.target_out);

  shx::ManifestEntry entry;
  entry.command = "synth";
  entry.params = {{"users_source", std::to_string(a.cfg.users_source)},
                  {"users_target", std::to_string(a.cfg.users_target)},
                  {"items_source", std::to_string(a.cfg.items_source)},
                  {"items_target", std::to_string(a.cfg.items_target)},
                  {"overlap_ratio", std::to_string(a.cfg.overlap_ratio)},
                  {"interactions_per_user", std::to_string(a.cfg.interactions_per_user)},
                  {"noise", std::to_string(a.cfg.noise)}};
  entry.outputs = {a.source_out, a.target_out};
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// build

struct BuildArgs {
  std::string source, target, out, split_out;
  std::string structure = "superhighway";
  std::string domain = "target";
  std::string eval_domain = "target";
  double alpha = 0.5;
  double beta = 1.0;
  std::uint64_t cap = 100'000'000;
  double holdout = 0.0;
  bool use_weights = false;
  bool skip_bad = false;
};

void run_build(const Globals& g, const BuildArgs& a) {
  Stopwatch watch;
  shx::IngestOptions opts{a.use_weights, a.skip_bad};
  shx::IngestLog slog, tlog;
  shx::CrossDomainSystem sys = shx::ingest(a.source, a.target, opts, &slog, &tlog);
  print_warnings(slog, "source");
  print_warnings(tlog, "target");

  if (a.holdout > 0.0) {
    auto [post, esplit] =
        shx::split(sys, a.holdout, g.seed, shx::domain_tag_from_string(a.eval_domain));
    sys = std::move(post);
    if (!a.split_out.empty()) shx::save_split(esplit, a.split_out);
  }

  const shx::StructureKind kind = shx::structure_kind_from_string(a.structure);
  shx::TrainingStructure ts;
  switch (kind) {
    case shx::StructureKind::Single:
      ts = shx::single_structure(sys, shx::domain_tag_from_string(a.domain));
      break;
    case shx::StructureKind::Highway:
      ts = shx::merge_highway(sys);
      break;
    case shx::StructureKind::Superhighway:
      ts = shx::construct_superhighway(sys, {a.alpha, a.beta, a.cap});
      break;
  }
  shx::save_structure(ts, a.out);

  shx::ManifestEntry entry;
  entry.command = "build";
  entry.params = {{"structure", a.structure},
                  {"alpha", std::to_string(a.alpha)},
                  {"beta", std::to_string(a.beta)},
                  {"holdout", std::to_string(a.holdout)}};
  entry.inputs = {a.source, a.target};
  entry.outputs = {a.out};
  if (a.holdout > 0.0 && !a.split_out.empty()) entry.outputs.push_back(a.split_out);
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string structure_path, out, model = "mf";
  shx::TrainConfig cfg;
  bool pretrain = false;
  std::string source, target;
  std::string eval_domain = "target";
  double holdout = 0.0;
  int finetune_epochs = -1;
  bool use_weights = false;
  bool skip_bad = false;
};

void run_train(const Globals& g, TrainArgs& a) {
  Stopwatch watch;
  a.cfg.seed = g.seed;
  a.cfg.workers = g.workers;
  const shx::Backend backend = shx::backend_from_string(a.model);

  shx::ManifestEntry entry;
  entry.command = "train";
  entry.params = {{"model", a.model},
                  {"dims", std::to_string(a.cfg.dims)},
                  {"epochs", std::to_string(a.cfg.epochs)}};

  if (a.pretrain) {
    if (a.source.empty() || a.target.empty()) {
      shx::fail(ErrorCode::InvalidParam, "--pretrain needs --source and --target");
    }
    shx::IngestOptions opts{a.use_weights, a.skip_bad};
    shx::CrossDomainSystem sys = shx::ingest(a.source, a.target, opts);
    if (a.holdout > 0.0) {
      auto [post, esplit] =
          shx::split(sys, a.holdout, g.seed, shx::domain_tag_from_string(a.eval_domain));
      sys = std::move(post);
    }
    const shx::EmbeddingModel model =
        shx::train_transfer(sys, backend, a.cfg, a.finetune_epochs);
    shx::ConfigEcho context{"pretrained", 0.0, 0.0, a.model, g.seed};
    shx::save_model(model, a.out, &context);
    entry.params.emplace_back("pretrain", "true");
    entry.inputs = {a.source, a.target};
  } else {
    if (a.structure_path.empty()) {
      shx::fail(ErrorCode::InvalidParam, "train needs --structure (or --pretrain)");
    }
    const shx::TrainingStructure ts = shx::load_structure(a.structure_path);
    const shx::EmbeddingModel model = shx::train(ts, backend, a.cfg);
    shx::ConfigEcho context{std::string(shx::to_string(ts.kind)), ts.provenance.alpha,
                            ts.provenance.beta, a.model, g.seed};
    shx::save_model(model, a.out, &context);
    entry.inputs = {a.structure_path};
  }
  entry.outputs = {a.out, a.out + ".meta.json"};
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model, split_path, out;
  int k = 10;
  std::string similarity = "cosine";
  bool all_queries = false;
  bool table = false;
};

void run_eval(const Globals& g, const EvalArgs& a) {
  Stopwatch watch;
  const shx::EmbeddingModel model = shx::load_model(a.model);
  const shx::EvalSplit esplit = shx::load_split(a.split_path);

  shx::EvalOptions opts;
  opts.k = a.k;
  opts.similarity = shx::similarity_from_string(a.similarity);
  opts.queries = a.all_queries ? shx::QueryMode::AllItems : shx::QueryMode::TopDegree;
  opts.config = shx::load_model_context(a.model);
  const shx::EvalReport report = shx::evaluate(model, esplit, opts);

  if (a.out.empty()) {
    std::cout << shx::report_to_json(report) << "\n";
  } else {
    shx::save_report(report, a.out);
  }
  if (a.table) std::cout << shx::render_comparison_table({report});

  shx::ManifestEntry entry;
  entry.command = "eval";
  entry.params = {{"k", std::to_string(a.k)}, {"similarity", a.similarity}};
  entry.inputs = {a.model, a.split_path};
  if (!a.out.empty()) entry.outputs = {a.out};
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// grid

struct GridArgs {
  std::string source, target, out, best_report, model = "mf";
  shx::GridRange alphas = shx::GridRange::alpha_default();
  shx::GridRange betas = shx::GridRange::beta_default();
  shx::GridOptions opts;
  std::string eval_domain = "target";
  std::string similarity = "cosine";
  bool use_weights = false;
  bool skip_bad = false;
};

void run_grid(const Globals& g, GridArgs& a) {
  Stopwatch watch;
  shx::IngestOptions iopts{a.use_weights, a.skip_bad};
  const shx::CrossDomainSystem sys = shx::ingest(a.source, a.target, iopts);

  a.opts.train.seed = g.seed;
  a.opts.train.workers = g.workers;
  a.opts.eval_domain = shx::domain_tag_from_string(a.eval_domain);
  a.opts.similarity = shx::similarity_from_string(a.similarity);
  const shx::GridResult result =
      shx::grid_search(sys, shx::backend_from_string(a.model), a.alphas, a.betas, a.opts);

  shx::save_grid(result, a.out);
  const auto best = std::find_if(result.cells.begin(), result.cells.end(),
                                 [](const shx::GridCell& c) { return c.ok; });
  if (best == result.cells.end()) {
    shx::fail(ErrorCode::InvalidParam, "every grid cell failed; see " + a.out);
  }
  if (!a.best_report.empty()) shx::save_report(best->report, a.best_report);
  std::cout << "best alpha=" << best->alpha << " beta=" << best->beta
            << " map@" << result.k << "=" << best->report.map_at_k << "\n";

  shx::ManifestEntry entry;
  entry.command = "grid";
  entry.params = {{"model", a.model},
                  {"alpha", std::to_string(a.alphas.start) + ":" +
                                std::to_string(a.alphas.stop) + ":" +
                                std::to_string(a.alphas.step)},
                  {"beta", std::to_string(a.betas.start) + ":" + std::to_string(a.betas.stop) +
                               ":" + std::to_string(a.betas.step)},
                  {"k", std::to_string(a.opts.k)}};
  entry.inputs = {a.source, a.target};
  entry.outputs = {a.out};
  if (!a.best_report.empty()) entry.outputs.push_back(a.best_report);
  finish(g, entry, watch);
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> reports;
  std::string out;
};

void run_report(const Globals& g, const ReportArgs& a) {
  Stopwatch watch;
  std::vector<shx::EvalReport> reports;
  reports.reserve(a.reports.size());
  for (const std::string& path : a.reports) reports.push_back(shx::load_report(path));
  const std::string table = shx::render_comparison_table(reports);
  std::cout << table;
  if (!a.out.empty()) write_text(a.out, table);

  shx::ManifestEntry entry;
  entry.command = "report";
  entry.inputs = a.reports;
  if (!a.out.empty()) entry.outputs = {a.out};
  finish(g, entry, watch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superhighway construction for cross-domain recommendation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file mirroring the flags");

  Globals g;
  app.add_option("--seed", g.seed, "base seed for every random stage")->envname("SHX_SEED");
  app.add_option("--manifest", g.manifest, "pipeline manifest path (JSON lines)");
  app.add_flag("--no-manifest", g.no_manifest, "skip manifest writing");
  app.add_option("--workers", g.workers, "worker threads (>1 forfeits bit-reproducibility)");

  IngestArgs ingest_args;
  auto* c_ingest = app.add_subcommand("ingest", "validate TSV inputs and report stats");
  c_ingest->fallthrough();
  c_ingest->add_option("--source", ingest_args.source, "source-domain TSV")->required();
  c_ingest->add_option("--target", ingest_args.target, "target-domain TSV")->required();
  c_ingest->add_option("--out", ingest_args.out, "stats JSON path (default stdout)");
  c_ingest->add_flag("--use-weights", ingest_args.use_weights,
                     "keep third-column weights instead of binarizing");
  c_ingest->add_flag("--skip-bad-lines", ingest_args.skip_bad,
                     "tolerate malformed lines (warn instead of fail)");

  SynthArgs synth_args;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic cross-domain dataset");
  c_synth->fallthrough();
  c_synth->add_option("--source-out", synth_args.source_out, "source TSV path")->required();
  c_synth->add_option("--target-out", synth_args.target_out, "target TSV path")->required();
  c_synth->add_option("--users-source", synth_args.cfg.users_source, "source user count");
  c_synth->add_option("--users-target", synth_args.cfg.users_target, "target user count");
  c_synth->add_option("--items-source", synth_args.cfg.items_source, "source item count");
  c_synth->add_option("--items-target", synth_args.cfg.items_target, "target item count");
  c_synth->add_option("--overlap", synth_args.cfg.overlap_ratio,
                      "fraction of target items shared with the source");
  c_synth->add_option("--latent-dims", synth_args.cfg.latent_dims, "ground-truth latent dims");
  c_synth->add_option("--ipu", synth_args.cfg.interactions_per_user,
                      "mean interactions per source user");
  c_synth->add_option("--ipu-target", synth_args.cfg.interactions_per_user_target,
                      "mean interactions per target user (0 = same as source)");
  c_synth->add_option("--noise", synth_args.cfg.noise, "preference noise level");

  BuildArgs build_args;
  auto* c_build = app.add_subcommand("build", "build a training structure from TSV inputs");
  c_build->fallthrough();
  c_build->add_option("--source", build_args.source, "source-domain TSV")->required();
  c_build->add_option("--target", build_args.target, "target-domain TSV")->required();
  c_build->add_option("--structure", build_args.structure,
                      "single | highway | superhighway");
  c_build->add_option("--alpha", build_args.alpha, "smoothness threshold, in (0,1]");
  c_build->add_option("--beta", build_args.beta, "alignment scaling factor, >= 0");
  c_build->add_option("--cap", build_args.cap, "candidate-pair cap");
  c_build->add_option("--domain", build_args.domain, "domain for --structure single");
  c_build->add_option("--holdout", build_args.holdout,
                      "per-user holdout fraction applied before building");
  c_build->add_option("--split", build_args.split_out, "where to save the holdout split");
  c_build->add_option("--eval-domain", build_args.eval_domain, "domain the holdout evaluates");
  c_build->add_option("--out", build_args.out, "structure file path")->required();
  c_build->add_flag("--use-weights", build_args.use_weights, "keep third-column weights");
  c_build->add_flag("--skip-bad-lines", build_args.skip_bad, "tolerate malformed lines");

  TrainArgs train_args;
  auto* c_train = app.add_subcommand("train", "train an embedding model on a structure");
  c_train->fallthrough();
  c_train->add_option("--structure", train_args.structure_path, "structure file");
  c_train->add_option("--model", train_args.model, "mf | deepwalk | hpe");
  c_train->add_option("--out", train_args.out, "model file path")->required();
  c_train->add_option("--dims", train_args.cfg.dims, "embedding dimensions");
  c_train->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  c_train->add_option("--lr", train_args.cfg.learning_rate, "initial learning rate");
  c_train->add_option("--lr-floor", train_args.cfg.learning_rate_floor,
                      "learning-rate decay floor");
  c_train->add_option("--negatives", train_args.cfg.negatives, "negative samples per pair");
  c_train->add_option("--walks", train_args.cfg.walks_per_node, "walks per node (deepwalk)");
  c_train->add_option("--walk-length", train_args.cfg.walk_length, "walk length (deepwalk)");
  c_train->add_option("--window", train_args.cfg.window, "context window (deepwalk)");
  c_train->add_option("--hpe-length", train_args.cfg.hpe_walk_length,
                      "context walk length (hpe)");
  c_train->add_option("--lambda", train_args.cfg.lambda, "regularization (mf)");
  c_train->add_flag("--pretrain", train_args.pretrain,
                    "pretrain on the source domain, fine-tune on the target");
  c_train->add_option("--source", train_args.source, "source TSV (with --pretrain)");
  c_train->add_option("--target", train_args.target, "target TSV (with --pretrain)");
  c_train->add_option("--holdout", train_args.holdout,
                      "holdout fraction replayed before pretraining");
  c_train->add_option("--eval-domain", train_args.eval_domain, "domain the holdout evaluates");
  c_train->add_option("--finetune-epochs", train_args.finetune_epochs,
                      "fine-tune epochs (-1 = same as --epochs)");
  c_train->add_flag("--use-weights", train_args.use_weights, "keep third-column weights");
  c_train->add_flag("--skip-bad-lines", train_args.skip_bad, "tolerate malformed lines");

  EvalArgs eval_args;
  auto* c_eval = app.add_subcommand("eval", "evaluate a model against a holdout split");
  c_eval->fallthrough();
  c_eval->add_option("--model", eval_args.model, "model file")->required();
  c_eval->add_option("--split", eval_args.split_path, "split file")->required();
  c_eval->add_option("--k", eval_args.k, "ranking cutoff");
  c_eval->add_option("--similarity", eval_args.similarity, "cosine | dot");
  c_eval->add_flag("--all-queries", eval_args.all_queries,
                   "average over every training item as query");
  c_eval->add_option("--out", eval_args.out, "report JSON path (default stdout)");
  c_eval->add_flag("--table", eval_args.table, "also print the plain-text table");

  GridArgs grid_args;
  auto* c_grid = app.add_subcommand("grid", "alpha/beta grid search");
  c_grid->fallthrough();
  c_grid->add_option("--source", grid_args.source, "source-domain TSV")->required();
  c_grid->add_option("--target", grid_args.target, "target-domain TSV")->required();
  c_grid->add_option("--model", grid_args.model, "mf | deepwalk | hpe");
  c_grid->add_option("--alpha-start", grid_args.alphas.start, "alpha range start");
  c_grid->add_option("--alpha-stop", grid_args.alphas.stop, "alpha range stop");
  c_grid->add_option("--alpha-step", grid_args.alphas.step, "alpha range step");
  c_grid->add_option("--beta-start", grid_args.betas.start, "beta range start");
  c_grid->add_option("--beta-stop", grid_args.betas.stop, "beta range stop");
  c_grid->add_option("--beta-step", grid_args.betas.step, "beta range step");
  c_grid->add_option("--k", grid_args.opts.k, "ranking cutoff");
  c_grid->add_option("--holdout", grid_args.opts.holdout_fraction, "holdout fraction");
  c_grid->add_option("--eval-domain", grid_args.eval_domain, "domain to evaluate");
  c_grid->add_option("--similarity", grid_args.similarity, "cosine | dot");
  c_grid->add_option("--cap", grid_args.opts.pair_cap, "candidate-pair cap");
  c_grid->add_option("--dims", grid_args.opts.train.dims, "embedding dimensions");
  c_grid->add_option("--epochs", grid_args.opts.train.epochs, "training epochs");
  c_grid->add_option("--lr", grid_args.opts.train.learning_rate, "initial learning rate");
  c_grid->add_option("--negatives", grid_args.opts.train.negatives, "negative samples");
  c_grid->add_option("--walks", grid_args.opts.train.walks_per_node, "walks per node");
  c_grid->add_option("--walk-length", grid_args.opts.train.walk_length, "walk length");
  c_grid->add_option("--window", grid_args.opts.train.window, "context window");
  c_grid->add_option("--hpe-length", grid_args.opts.train.hpe_walk_length,
                     "context walk length (hpe)");
  c_grid->add_option("--lambda", grid_args.opts.train.lambda, "regularization (mf)");
  c_grid->add_option("--out", grid_args.out, "grid JSON path")->required();
  c_grid->add_option("--best-report", grid_args.best_report,
                     "where to save the best cell's full report");
  c_grid->add_flag("--use-weights", grid_args.use_weights, "keep third-column weights");
  c_grid->add_flag("--skip-bad-lines", grid_args.skip_bad, "tolerate malformed lines");

  ReportArgs report_args;
  auto* c_report = app.add_subcommand("report", "render a structure x model comparison table");
  c_report->fallthrough();
  c_report->add_option("reports", report_args.reports, "report JSON files")
      ->required()
      ->expected(-1);
  c_report->add_option("--out", report_args.out, "table text path (default stdout only)");

  c_ingest->callback([&] { run_ingest(g, ingest_args); });
  c_synth->callback([&] { run_synth(g, synth_args); });
  c_build->callback([&] { run_build(g, build_args); });
  c_train->callback([&] { run_train(g, train_args); });
  c_eval->callback([&] { run_eval(g, eval_args); });
  c_grid->callback([&] { run_grid(g, grid_args); });
  c_report->callback([&] { run_report(g, report_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "shx: InvalidArgs: " << single_line(e.what()) << "\n";
    const int code = e.get_exit_code();
    return code == 0 ? 1 : code;
  } catch (const Error& e) {
    std::cerr << "shx: error: " << single_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "shx: InternalError: " << single_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
