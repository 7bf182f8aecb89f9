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
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "shx/data.hpp"
#include "shx/eval.hpp"
#include "shx/graph.hpp"
#include "test_util.hpp"

using namespace shx;
using shxtest::it;
using shxtest::su;
using shxtest::tu;

TEST_CASE("ingest: counts lines, collapses duplicates, namespaces users per domain") {
  shxtest::TempDir dir;
  shxtest::write_text(dir.file("src.tsv"),
                      "# listening history\n"
                      "alice\tsong1\n"
                      "bob\tsong2\n"
                      "\n"
                      "alice\tsong2\n");
  shxtest::write_text(dir.file("tgt.tsv"),
                      "alice\tsong2\t2.0\n"
                      "alice\tsong2\t5.0\n"
                      "alice\tsong2\t1.0\n"
                      "carol\tbook1\n");

  IngestLog slog, tlog;
  IngestOptions opts;
  opts.use_weights = true;
  auto sys = ingest(dir.file("src.tsv"), dir.file("tgt.tsv"), opts, &slog, &tlog);

  CHECK(slog.lines == 3);
  CHECK(slog.edges == 3);
  CHECK(slog.duplicates_collapsed == 0);

  CHECK(tlog.lines == 4);
  CHECK(tlog.edges == 2);
  CHECK(tlog.duplicates_collapsed == 2);
  REQUIRE(tlog.warnings.size() == 2);
  CHECK(tlog.warnings[0].find("tgt.tsv:2") != std::string::npos);
  CHECK(tlog.warnings[0].find("duplicate") != std::string::npos);

  // same raw key, two distinct user nodes
  CHECK(sys.source().graph().contains(su("alice")));
  CHECK(sys.target().graph().contains(tu("alice")));
  CHECK(sys.shared_items() == std::vector<NodeId>{it("song2")});

  // duplicate collapse keeps the max weight
  const auto nb = sys.target().graph().neighbors(tu("alice"));
  REQUIRE(nb.size() == 1);
  CHECK(nb[0].second == 5.0);
}

TEST_CASE("ingest: weight column is ignored unless asked for") {
  shxtest::TempDir dir;
  shxtest::write_text(dir.file("d.tsv"), "u1\ti1\t7.5\nu2\ti2\n");

  auto binarized = ingest_domain(dir.file("d.tsv"), DomainTag::Source, {});
  CHECK(binarized.graph().neighbors(su("u1"))[0].second == 1.0);

  IngestOptions weighted;
  weighted.use_weights = true;
  auto kept = ingest_domain(dir.file("d.tsv"), DomainTag::Source, weighted);
  CHECK(kept.graph().neighbors(su("u1"))[0].second == 7.5);
  CHECK(kept.graph().neighbors(su("u2"))[0].second == 1.0);
}

TEST_CASE("ingest: bad lines fail fast with file and line, or skip on request") {
  shxtest::TempDir dir;
  shxtest::write_text(dir.file("bad.tsv"), "u1\ti1\njustonecolumn\nu2\ti2\n");

  bool threw = false;
  try {
    ingest_domain(dir.file("bad.tsv"), DomainTag::Source, {});
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::Ingest);
    CHECK(std::string(e.what()).find("bad.tsv:2") != std::string::npos);
  }
  CHECK(threw);

  IngestOptions lax;
  lax.skip_bad_lines = true;
  IngestLog log;
  auto g = ingest_domain(dir.file("bad.tsv"), DomainTag::Source, lax, &log);
  CHECK(g.edge_count() == 2);
  CHECK(log.bad_lines_skipped == 1);
  REQUIRE(log.warnings.size() == 1);
  CHECK(log.warnings[0].find("bad.tsv:2") != std::string::npos);
}

TEST_CASE("ingest: weight parsing rejects junk, non-positive, and non-finite values") {
  shxtest::TempDir dir;
  IngestOptions weighted;
  weighted.use_weights = true;

  for (const char* field : {"abc", "1.5x", "-2", "0", "nan", "inf"}) {
    shxtest::write_text(dir.file("w.tsv"), std::string("u\ti\t") + field + "\n");
    SHXT_THROWS_CODE(ingest_domain(dir.file("w.tsv"), DomainTag::Source, weighted),
                     ErrorCode::Ingest);
  }

  shxtest::write_text(dir.file("sp.tsv"), "a b\ti\n");
  SHXT_THROWS_CODE(ingest_domain(dir.file("sp.tsv"), DomainTag::Source, {}), ErrorCode::Ingest);
}

TEST_CASE("ingest: empty inputs and missing files") {
  shxtest::TempDir dir;
  shxtest::write_text(dir.file("empty.tsv"), "# nothing here\n\n");
  SHXT_THROWS_CODE(ingest_domain(dir.file("empty.tsv"), DomainTag::Target, {}),
                   ErrorCode::EmptyDomain);
  SHXT_THROWS_CODE(ingest_domain(dir.file("missing.tsv"), DomainTag::Target, {}),
                   ErrorCode::Io);
}

TEST_CASE("export then ingest reproduces the graph exactly") {
  shxtest::TempDir dir;
  auto orig = DomainGraph::build(
      DomainTag::Target, {{tu("p"), it("x"), 0.1234567890123456789},
                          {tu("p"), it("y"), 3.0},
                          {tu("q"), it("y"), 1e-7}});
  export_tsv(orig, dir.file("out.tsv"));

  IngestOptions weighted;
  weighted.use_weights = true;
  auto back = ingest_domain(dir.file("out.tsv"), DomainTag::Target, weighted);
  CHECK(back == orig);

  const auto text = shxtest::read_text(dir.file("out.tsv"));
  // three columns on every line
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = text.find('\n', pos)) != std::string::npos; ++pos) ++lines;
  CHECK(lines == 3);
  CHECK(std::count(text.begin(), text.end(), '\t') == 6);
}

TEST_CASE("synth config validation") {
  SynthConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SynthConfig bad = cfg;
  bad.users_source = 0;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  bad = cfg;
  bad.overlap_ratio = 1.0001;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  bad = cfg;
  bad.latent_dims = 0;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  bad = cfg;
  bad.interactions_per_user = 0.5;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  // demand beyond the catalog is infeasible
  bad = cfg;
  bad.interactions_per_user = static_cast<double>(bad.items_source) + 1.0;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  // more shared items than the smaller catalog holds
  bad = cfg;
  bad.items_source = 10;
  bad.items_target = 60;
  bad.overlap_ratio = 0.5;
  CHECK(bad.shared_item_count() == 30);
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);

  bad = cfg;
  bad.noise = -0.1;
  SHXT_THROWS_CODE(bad.validate(), ErrorCode::InvalidParam);
}

TEST_CASE("synth: well-formed system, overlap bounds, per-domain interaction means") {
  SynthConfig cfg;
  cfg.users_source = 40;
  cfg.users_target = 30;
  cfg.items_source = 25;
  cfg.items_target = 20;
  cfg.overlap_ratio = 0.5;
  cfg.interactions_per_user = 6;
  cfg.interactions_per_user_target = 3;
  cfg.seed = 11;

  auto r = generate_synthetic(cfg);
  CHECK_NOTHROW(validate(r.sys));
  CHECK(r.sys.source().user_count() == 40);
  CHECK(r.sys.target().user_count() == 30);
  CHECK(r.latent_dims == cfg.latent_dims);

  // every observed shared item carries the generated shared-key space
  CHECK(r.sys.shared_items().size() <= cfg.shared_item_count());
  CHECK(!r.sys.shared_items().empty());

  // every user interacts at least once and latents exist for every node
  for (const DomainGraph* dg : {&r.sys.source(), &r.sys.target()}) {
    for (const auto& u : dg->users()) {
      CHECK(dg->graph().neighbors(u).size() >= 1);
      CHECK(r.latents.count(u) == 1);
    }
    for (const auto& i : dg->items()) CHECK(r.latents.count(i) == 1);
  }
}

TEST_CASE("synth: same seed gives identical data, different seed does not") {
  SynthConfig cfg;
  cfg.users_source = 25;
  cfg.users_target = 20;
  cfg.items_source = 15;
  cfg.items_target = 12;
  cfg.interactions_per_user = 5;
  cfg.seed = 77;

  shxtest::TempDir dir;
  auto a = generate_synthetic(cfg);
  auto b = generate_synthetic(cfg);
  CHECK(a.sys.source() == b.sys.source());
  CHECK(a.sys.target() == b.sys.target());
  CHECK(a.latents == b.latents);

  export_tsv(a.sys.source(), dir.file("a.tsv"));
  export_tsv(b.sys.source(), dir.file("b.tsv"));
  CHECK(shxtest::read_text(dir.file("a.tsv")) == shxtest::read_text(dir.file("b.tsv")));

  cfg.seed = 78;
  auto c = generate_synthetic(cfg);
  CHECK(a.sys.source() != c.sys.source());
}

TEST_CASE("synth: overlap extremes") {
  SynthConfig cfg;
  cfg.users_source = 20;
  cfg.users_target = 20;
  cfg.items_source = 12;
  cfg.items_target = 12;
  cfg.interactions_per_user = 4;

  cfg.overlap_ratio = 0.0;
  auto none = generate_synthetic(cfg);
  CHECK(none.sys.shared_items().empty());
  SHXT_THROWS_CODE(identify_candidates(none.sys, DomainTag::Source, 0.5),
                   ErrorCode::EmptySharedItems);

  cfg.overlap_ratio = 1.0;
  cfg.interactions_per_user = 8;
  auto all = generate_synthetic(cfg);
  // with a fully shared catalog every observed target item is shared
  for (const auto& i : all.sys.target().items()) CHECK(all.sys.is_shared(i));
  auto cands = identify_candidates(all.sys, DomainTag::Target, 1.0);
  CHECK(cands.users.size() == all.sys.target().user_count());
}

TEST_CASE("synth: with zero noise each user takes the items nearest their latent") {
  SynthConfig cfg;
  cfg.users_source = 50;
  cfg.users_target = 40;
  cfg.items_source = 20;
  cfg.items_target = 18;
  cfg.overlap_ratio = 0.5;
  cfg.latent_dims = 2;
  cfg.interactions_per_user = 6;
  cfg.noise = 0.0;
  cfg.seed = 5;

  auto r = generate_synthetic(cfg);
  for (const DomainGraph* dg : {&r.sys.source(), &r.sys.target()}) {
    const auto pool = dg->items();
    for (const auto& u : dg->users()) {
      const auto& ul = r.latents.at(u);
      auto dot = [&](const NodeId& i) {
        const auto& il = r.latents.at(i);
        double s = 0.0;
        for (std::size_t d = 0; d < ul.size(); ++d) s += ul[d] * il[d];
        return s;
      };
      std::set<NodeId> linked;
      for (const auto& [n, w] : dg->graph().neighbors(u)) linked.insert(n);

      double min_linked = std::numeric_limits<double>::infinity();
      double max_other = -std::numeric_limits<double>::infinity();
      for (const auto& i : pool) {
        if (linked.count(i)) {
          min_linked = std::min(min_linked, dot(i));
        } else {
          max_other = std::max(max_other, dot(i));
        }
      }
      if (linked.size() < pool.size()) CHECK(min_linked > max_other);
    }
  }
}

TEST_CASE("synth: a ground-truth ranker degrades as noise rises") {
  SynthConfig cfg;
  cfg.users_source = 30;
  cfg.users_target = 60;
  cfg.items_source = 30;
  cfg.items_target = 30;
  cfg.overlap_ratio = 0.5;
  cfg.latent_dims = 4;
  cfg.interactions_per_user = 6;

  auto map_for = [&](double noise, std::uint64_t seed) {
    SynthConfig c = cfg;
    c.noise = noise;
    c.seed = seed;
    auto r = generate_synthetic(c);
    const auto pool = r.sys.target().items();
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& u : r.sys.target().users()) {
      const auto& ul = r.latents.at(u);
      std::vector<std::pair<double, NodeId>> scored;
      for (const auto& i : pool) {
        const auto& il = r.latents.at(i);
        double s = 0.0;
        for (std::size_t d = 0; d < ul.size(); ++d) s += ul[d] * il[d];
        scored.emplace_back(-s, i);
      }
      std::sort(scored.begin(), scored.end());
      std::vector<NodeId> ranked;
      for (const auto& [s, i] : scored) ranked.push_back(i);
      std::set<NodeId> relevant;
      for (const auto& [n, w] : r.sys.target().graph().neighbors(u)) relevant.insert(n);
      total += average_precision_at_k(ranked, relevant, 10);
      ++count;
    }
    return total / static_cast<double>(count);
  };

  double clean = 0.0, mild = 0.0, heavy = 0.0;
  for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
    clean += map_for(0.0, seed);
    mild += map_for(0.5, seed);
    heavy += map_for(3.0, seed);
  }
  clean /= 5;
  mild /= 5;
  heavy /= 5;

  CHECK(clean == doctest::Approx(1.0));
  CHECK(mild < clean);
  CHECK(heavy < mild - 0.02);
}
