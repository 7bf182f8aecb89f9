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

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "shx/alias.hpp"
#include "shx/embed.hpp"
#include "shx/graph.hpp"
#include "shx/rng.hpp"
#include "test_util.hpp"

using namespace shx;
using shxtest::it;
using shxtest::su;
using shxtest::tu;

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  return denom > 0.0 ? d / denom : 0.0;
}

/// Two complete user-item blocks joined by one bridge item.
TrainingStructure two_block_structure() {
  std::vector<EdgeRec> edges;
  for (int u = 0; u < 3; ++u) {
    for (int i = 0; i < 3; ++i) {
      edges.push_back({su("a" + std::to_string(u)), it("xa" + std::to_string(i))});
      edges.push_back({su("b" + std::to_string(u)), it("xb" + std::to_string(i))});
    }
  }
  edges.push_back({su("a0"), it("bridge")});
  edges.push_back({su("b0"), it("bridge")});
  TrainingStructure s;
  s.kind = StructureKind::Single;
  s.graph = Graph::build(std::move(edges));
  return s;
}

}  // namespace

TEST_CASE("alias table: validation and empirical distribution") {
  SHXT_THROWS_CODE(AliasTable(std::vector<double>{}), ErrorCode::InvalidParam);
  SHXT_THROWS_CODE(AliasTable(std::vector<double>{1.0, -0.5}), ErrorCode::InvalidParam);
  SHXT_THROWS_CODE(AliasTable(std::vector<double>{0.0, 0.0}), ErrorCode::InvalidParam);

  const std::vector<double> weights{1.0, 2.0, 3.0, 4.0};
  AliasTable table(weights);
  CHECK(table.size() == 4);

  Rng rng(99);
  std::array<int, 4> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[table.sample(rng)];
  for (int i = 0; i < 4; ++i) {
    const double freq = static_cast<double>(counts[i]) / n;
    CHECK(std::abs(freq - weights[i] / 10.0) < 0.02);
  }

  AliasTable single(std::vector<double>{7.0});
  for (int i = 0; i < 10; ++i) CHECK(single.sample(rng) == 0);
}

TEST_CASE("transition tables: empty for isolated nodes, weight-proportional steps") {
  auto g = Graph::build({{su("c"), it("l1"), 1.0}, {su("c"), it("l2"), 9.0}}, {it("alone")});
  const auto tables = build_transition_tables(g);
  REQUIRE(tables.size() == g.node_count());
  CHECK(tables[*g.index_of(it("alone"))].empty());

  const auto center = *g.index_of(su("c"));
  const auto l1 = *g.index_of(it("l1"));
  Rng rng(5);
  int hits_l1 = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto step = g.adjacency(center)[tables[center].sample(rng)].node;
    if (step == l1) ++hits_l1;
  }
  const double freq = static_cast<double>(hits_l1) / n;
  CHECK(std::abs(freq - 0.1) < 0.02);
}

TEST_CASE("random walk: exact length, alternation on a two-node graph, isolated stop") {
  auto g = Graph::build({{su("u"), it("i")}}, {su("alone")});
  const auto tables = build_transition_tables(g);
  Rng rng(1);

  const auto start = *g.index_of(su("u"));
  const auto walk = random_walk(g, tables, start, 7, rng);
  REQUIRE(walk.size() == 7);
  for (std::size_t k = 0; k < walk.size(); ++k) {
    const auto expect = k % 2 == 0 ? start : *g.index_of(it("i"));
    CHECK(walk[k] == expect);
  }

  const auto one = random_walk(g, tables, start, 1, rng);
  CHECK(one == std::vector<NodeIndex>{start});

  const auto alone = *g.index_of(su("alone"));
  const auto stuck = random_walk(g, tables, alone, 5, rng);
  CHECK(stuck == std::vector<NodeIndex>{alone});
}

TEST_CASE("random walk: first-step distribution passes a chi-square test") {
  auto g = Graph::build({{su("c"), it("n1"), 1.0},
                         {su("c"), it("n2"), 2.0},
                         {su("c"), it("n3"), 3.0},
                         {su("c"), it("n4"), 4.0}});
  const auto tables = build_transition_tables(g);
  const auto center = *g.index_of(su("c"));

  Rng rng(31);
  std::array<int, 4> counts{};
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const auto walk = random_walk(g, tables, center, 2, rng);
    REQUIRE(walk.size() == 2);
    const auto& adj = g.adjacency(center);
    for (int j = 0; j < 4; ++j) {
      if (adj[j].node == walk[1]) ++counts[j];
    }
  }

  double chi2 = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double expected = n * g.adjacency(center)[j].weight / 10.0;
    const double diff = counts[j] - expected;
    chi2 += diff * diff / expected;
  }
  // 99th percentile of chi-square with 3 degrees of freedom
  CHECK(chi2 < 11.345);
}

TEST_CASE("unigram noise table: counts raised to 3/4, zeros excluded") {
  const std::vector<double> counts{1.0, 16.0, 81.0, 256.0};
  // fourth roots cubed: 1, 8, 27, 64 over a total of 100
  const std::array<double, 4> expect{0.01, 0.08, 0.27, 0.64};
  AliasTable table(counts);  // raw weights for contrast
  AliasTable noise = unigram_noise_table(counts);

  Rng rng(17);
  std::array<int, 4> hist{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hist[noise.sample(rng)];
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(static_cast<double>(hist[i]) / n - expect[i]) < 0.02);
  }
  CHECK(table.size() == noise.size());

  AliasTable sparse = unigram_noise_table(std::vector<double>{0.0, 5.0});
  for (int i = 0; i < 1000; ++i) CHECK(sparse.sample(rng) == 1);
}

TEST_CASE("arc table: draws arcs in proportion to their weights") {
  auto g = Graph::build({{su("u1"), it("i1"), 1.0},
                         {su("u2"), it("i2"), 2.0},
                         {su("u3"), it("i3"), 3.0},
                         {su("u4"), it("i4"), 4.0}});
  const auto arcs = arc_list(g);
  REQUIRE(arcs.size() == 8);
  const auto table = build_arc_table(arcs);

  Rng rng(23);
  std::vector<int> hist(arcs.size(), 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++hist[table.sample(rng)];
  const double total = 20.0;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double freq = static_cast<double>(hist[a]) / n;
    CHECK(std::abs(freq - arcs[a].weight / total) < 0.02);
  }
}

TEST_CASE("deepwalk: neighborhoods inside a block embed closer than across blocks") {
  const auto s = two_block_structure();
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    TrainConfig cfg;
    cfg.dims = 16;
    cfg.epochs = 4;
    cfg.walks_per_node = 8;
    cfg.walk_length = 16;
    cfg.window = 4;
    cfg.seed = seed;

    const auto m = train(s, Backend::DeepWalk, cfg);
    double within = 0.0, across = 0.0;
    int wn = 0, an = 0;
    for (int u = 0; u < 3; ++u) {
      for (int v = u + 1; v < 3; ++v) {
        within += cosine(m.vector_of(su("a" + std::to_string(u))),
                         m.vector_of(su("a" + std::to_string(v))));
        within += cosine(m.vector_of(su("b" + std::to_string(u))),
                         m.vector_of(su("b" + std::to_string(v))));
        wn += 2;
      }
    }
    for (int u = 0; u < 3; ++u) {
      for (int v = 0; v < 3; ++v) {
        across += cosine(m.vector_of(su("a" + std::to_string(u))),
                         m.vector_of(su("b" + std::to_string(v))));
        ++an;
      }
    }
    CHECK(within / wn > across / an);
  }
}

TEST_CASE("hpe: items co-consumed inside a block embed closer than across blocks") {
  const auto s = two_block_structure();
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    TrainConfig cfg;
    cfg.dims = 16;
    cfg.epochs = 150;
    cfg.hpe_walk_length = 3;
    cfg.negatives = 4;
    cfg.seed = seed;

    const auto m = train(s, Backend::HPE, cfg);
    double within = 0.0, across = 0.0;
    int wn = 0, an = 0;
    for (int u = 0; u < 3; ++u) {
      for (int v = u + 1; v < 3; ++v) {
        within += cosine(m.vector_of(it("xa" + std::to_string(u))),
                         m.vector_of(it("xa" + std::to_string(v))));
        within += cosine(m.vector_of(it("xb" + std::to_string(u))),
                         m.vector_of(it("xb" + std::to_string(v))));
        wn += 2;
      }
    }
    for (int u = 0; u < 3; ++u) {
      for (int v = 0; v < 3; ++v) {
        across += cosine(m.vector_of(it("xa" + std::to_string(u))),
                         m.vector_of(it("xb" + std::to_string(v))));
        ++an;
      }
    }
    CHECK(within / wn > across / an);
  }
}

TEST_CASE("walk backends: same seed reproduces the model bit for bit") {
  const auto s = two_block_structure();
  TrainConfig cfg;
  cfg.dims = 8;
  cfg.epochs = 2;
  cfg.walks_per_node = 4;
  cfg.walk_length = 10;
  cfg.window = 3;
  cfg.seed = 12;

  for (Backend b : {Backend::DeepWalk, Backend::HPE}) {
    const auto m1 = train(s, b, cfg);
    const auto m2 = train(s, b, cfg);
    CHECK(m1 == m2);
    CHECK(m1.trainer() == b);

    TrainConfig moved = cfg;
    moved.seed = 13;
    CHECK(!(train(s, b, moved) == m1));

    for (std::size_t r = 0; r < m1.node_count(); ++r) {
      for (double v : m1.vector_at(r)) CHECK(std::isfinite(v));
    }
  }
}
