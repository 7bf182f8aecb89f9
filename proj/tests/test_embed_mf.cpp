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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "shx/data.hpp"
#include "shx/embed.hpp"
#include "shx/graph.hpp"
#include "test_util.hpp"

using namespace shx;
using shxtest::it;
using shxtest::su;
using shxtest::tu;

namespace {

TrainingStructure tiny_structure() {
  auto sys = shxtest::make_system({{su("a"), it("x")}, {su("b"), it("y")}},
                                  {{tu("p"), it("x")}, {tu("p"), it("y")}});
  return merge_highway(sys);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("train config validation") {
  TrainConfig ok;
  CHECK_NOTHROW(ok.validate());

  auto expect_bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    SHXT_THROWS_CODE(c.validate(), ErrorCode::InvalidParam);
  };
  expect_bad([](TrainConfig& c) { c.dims = 0; });
  expect_bad([](TrainConfig& c) { c.epochs = -1; });
  expect_bad([](TrainConfig& c) { c.learning_rate = 0.0; });
  expect_bad([](TrainConfig& c) { c.learning_rate_floor = 0.0; });
  expect_bad([](TrainConfig& c) { c.learning_rate_floor = c.learning_rate * 2; });
  expect_bad([](TrainConfig& c) { c.negatives = -1; });
  expect_bad([](TrainConfig& c) { c.walks_per_node = 0; });
  expect_bad([](TrainConfig& c) { c.walk_length = 0; });
  expect_bad([](TrainConfig& c) { c.window = 0; });
  expect_bad([](TrainConfig& c) { c.window = c.walk_length + 1; });
  expect_bad([](TrainConfig& c) { c.hpe_walk_length = 0; });
  expect_bad([](TrainConfig& c) { c.lambda = -1e-9; });
  expect_bad([](TrainConfig& c) { c.workers = 0; });

  TrainConfig zero_epochs;
  zero_epochs.epochs = 0;
  CHECK_NOTHROW(zero_epochs.validate());
}

TEST_CASE("backend names round-trip") {
  for (Backend b : {Backend::MF, Backend::DeepWalk, Backend::HPE}) {
    CHECK(backend_from_string(to_string(b)) == b);
  }
  SHXT_THROWS_CODE(backend_from_string("svd"), ErrorCode::InvalidParam);
}

TEST_CASE("init: uniform inputs inside the +-0.5/dims box, zero contexts") {
  const auto s = tiny_structure();
  TrainConfig cfg;
  cfg.dims = 16;
  cfg.seed = 9;
  const auto m = init_model(s, Backend::MF, cfg);

  CHECK(m.node_count() == s.graph.node_count());
  CHECK(m.nodes() == s.graph.nodes());
  CHECK(m.dims() == 16);
  CHECK(m.trainer() == Backend::MF);
  CHECK(m.seed() == 9);

  const double bound = 0.5 / 16.0;
  bool any_nonzero = false;
  for (std::size_t r = 0; r < m.node_count(); ++r) {
    for (double v : m.vector_at(r)) {
      CHECK(v >= -bound);
      CHECK(v <= bound);
      any_nonzero = any_nonzero || v != 0.0;
    }
    for (double v : m.context_at(r)) CHECK(v == 0.0);
  }
  CHECK(any_nonzero);

  const auto again = init_model(s, Backend::MF, cfg);
  CHECK(again == m);
  TrainConfig other = cfg;
  other.seed = 10;
  CHECK(!(init_model(s, Backend::MF, other) == m));

  SHXT_THROWS_CODE(m.row_of(su("nobody")), ErrorCode::NotFound);
  CHECK(m.contains(su("a")));
}

TEST_CASE("mf loss: hand-computed value") {
  const std::vector<double> x{1.0, 2.0}, y{3.0, -1.0};
  // x.y = 1, (2 - 1)^2 = 1, 0.1 * (5 + 10) = 1.5
  CHECK(mf_pair_loss(x, y, 2.0, 0.1) == doctest::Approx(2.5));
  CHECK(mf_pair_loss(x, y, 1.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("mf gradient matches central finite differences") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> val(-2.0, 2.0), wdist(0.0, 3.0), ldist(0.0, 0.5);
  const int dims = 5;
  const double h = 1e-6;

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(dims), y(dims);
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    const double w = wdist(rng);
    const double lambda = ldist(rng);

    std::vector<double> gx(dims), gy(dims);
    mf_pair_gradient(x, y, w, lambda, gx, gy);

    for (int d = 0; d < dims; ++d) {
      auto xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      const double num_x = (mf_pair_loss(xp, y, w, lambda) - mf_pair_loss(xm, y, w, lambda)) /
                           (2.0 * h);
      CHECK(std::abs(num_x - gx[d]) <= 1e-5 * std::max(1.0, std::abs(gx[d])));

      auto yp = y, ym = y;
      yp[d] += h;
      ym[d] -= h;
      const double num_y = (mf_pair_loss(x, yp, w, lambda) - mf_pair_loss(x, ym, w, lambda)) /
                           (2.0 * h);
      CHECK(std::abs(num_y - gy[d]) <= 1e-5 * std::max(1.0, std::abs(gy[d])));
    }
  }
}

TEST_CASE("arc list: both directions of every edge, sorted") {
  auto g = Graph::build({{su("a"), it("x"), 2.0}, {su("a"), it("y")}, {su("b"), it("x"), 3.0}});
  const auto arcs = arc_list(g);
  REQUIRE(arcs.size() == 2 * g.edge_count());

  for (std::size_t i = 1; i < arcs.size(); ++i) {
    const bool ordered = arcs[i - 1].src < arcs[i].src ||
                         (arcs[i - 1].src == arcs[i].src && arcs[i - 1].dst < arcs[i].dst);
    CHECK(ordered);
  }
  for (const auto& a : arcs) {
    CHECK(g.has_edge(a.src, a.dst));
    bool reverse = false;
    for (const auto& b : arcs) {
      if (b.src == a.dst && b.dst == a.src && b.weight == a.weight) reverse = true;
    }
    CHECK(reverse);
  }
}

TEST_CASE("mf: a single interaction is fit to its weight") {
  TrainingStructure s;
  s.kind = StructureKind::Single;
  s.graph = Graph::build({{tu("p"), it("x"), 2.0}});

  TrainConfig cfg;
  cfg.dims = 2;
  cfg.epochs = 800;
  cfg.learning_rate = 0.1;
  cfg.learning_rate_floor = 0.05;
  cfg.negatives = 0;
  cfg.lambda = 0.0;
  cfg.seed = 3;

  const auto m = train(s, Backend::MF, cfg);
  const auto u = m.row_of(tu("p"));
  const auto i = m.row_of(it("x"));
  CHECK(dot(m.vector_at(u), m.context_at(i)) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(dot(m.vector_at(i), m.context_at(u)) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("mf: negatives push unlinked pairs toward zero") {
  auto g = Graph::build({{su("u1"), it("i1")}, {su("u2"), it("i2")}});
  TrainingStructure s;
  s.kind = StructureKind::Single;
  s.graph = std::move(g);

  TrainConfig cfg;
  cfg.dims = 4;
  cfg.epochs = 600;
  cfg.learning_rate = 0.05;
  cfg.learning_rate_floor = 0.02;
  cfg.negatives = 2;
  cfg.lambda = 0.0;
  cfg.seed = 4;

  const auto m = train(s, Backend::MF, cfg);
  const double linked =
      dot(m.vector_of(su("u1")), m.context_at(m.row_of(it("i1"))));
  const double unlinked =
      std::abs(dot(m.vector_of(su("u1")), m.context_at(m.row_of(it("i2")))));
  CHECK(linked > 0.8);
  CHECK(unlinked < 0.4);
  CHECK(linked > unlinked + 0.3);
}

TEST_CASE("mf: same seed reproduces the model bit for bit") {
  SynthConfig sc;
  sc.users_source = 15;
  sc.users_target = 12;
  sc.items_source = 10;
  sc.items_target = 10;
  sc.interactions_per_user = 4;
  sc.seed = 6;
  auto sys = generate_synthetic(sc).sys;
  const auto s = merge_highway(sys);

  TrainConfig cfg;
  cfg.dims = 8;
  cfg.epochs = 3;
  cfg.seed = 42;

  const auto a = train(s, Backend::MF, cfg);
  const auto b = train(s, Backend::MF, cfg);
  CHECK(a == b);

  TrainConfig moved = cfg;
  moved.seed = 43;
  CHECK(!(train(s, Backend::MF, moved) == a));

  // vectors stay bounded under the default-ish setup
  for (std::size_t r = 0; r < a.node_count(); ++r) {
    for (double v : a.vector_at(r)) {
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) < 1e3);
    }
  }
}

TEST_CASE("mf: an absurd learning rate reports divergence with the epoch") {
  const auto s = tiny_structure();
  TrainConfig cfg;
  cfg.dims = 8;
  cfg.epochs = 30;
  cfg.learning_rate = 1e8;
  cfg.learning_rate_floor = 1e7;
  cfg.lambda = 1.0;
  cfg.seed = 1;

  bool threw = false;
  try {
    train(s, Backend::MF, cfg);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::Divergence);
    const std::string what = e.what();
    CHECK(what.find("epoch") != std::string::npos);
    CHECK(what.find("learning rate") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("train rejects empty structures and mismatched models") {
  TrainingStructure empty;
  TrainConfig cfg;
  cfg.dims = 4;
  SHXT_THROWS_CODE(train(empty, Backend::MF, cfg), ErrorCode::InvalidParam);

  const auto s = tiny_structure();
  auto m = init_model(s, Backend::MF, cfg);
  TrainConfig other = cfg;
  other.dims = 8;
  SHXT_THROWS_CODE(train_in_place(m, s, other), ErrorCode::InvalidParam);

  auto small = init_model(tiny_structure(), Backend::MF, cfg);
  TrainingStructure bigger = s;
  bigger.graph = Graph::build({{su("a"), it("x")}, {su("b"), it("y")}, {su("c"), it("z")}});
  SHXT_THROWS_CODE(train_in_place(small, bigger, cfg), ErrorCode::InvalidParam);
}

TEST_CASE("mf: multi-worker training still yields finite vectors") {
  SynthConfig sc;
  sc.users_source = 20;
  sc.users_target = 15;
  sc.items_source = 12;
  sc.items_target = 10;
  sc.interactions_per_user = 4;
  sc.seed = 8;
  auto sys = generate_synthetic(sc).sys;
  const auto s = merge_highway(sys);

  TrainConfig cfg;
  cfg.dims = 8;
  cfg.epochs = 2;
  cfg.workers = 4;

  const auto m = train(s, Backend::MF, cfg);
  for (std::size_t r = 0; r < m.node_count(); ++r) {
    for (double v : m.vector_at(r)) CHECK(std::isfinite(v));
  }
}
