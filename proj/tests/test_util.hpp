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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "shx/error.hpp"
#include "shx/graph.hpp"

/// Asserts that `expr` throws shx::Error carrying exactly `code`.
#define SHXT_THROWS_CODE(expr, expected)                                 \
  do {                                                                   \
    bool shxt_threw = false;                                             \
    try {                                                                \
      (void)(expr);                                                      \
    } catch (const shx::Error& shxt_err) {                               \
      shxt_threw = true;                                                 \
      CHECK_MESSAGE(shxt_err.code() == (expected), shxt_err.what());     \
    }                                                                    \
    CHECK_MESSAGE(shxt_threw, #expr " did not throw");                   \
  } while (0)

namespace shxtest {

inline shx::NodeId su(std::string key) { return shx::NodeId::source_user(std::move(key)); }
inline shx::NodeId tu(std::string key) { return shx::NodeId::target_user(std::move(key)); }
inline shx::NodeId it(std::string key) { return shx::NodeId::item(std::move(key)); }

inline shx::CrossDomainSystem make_system(std::vector<shx::EdgeRec> source_edges,
                                          std::vector<shx::EdgeRec> target_edges) {
  auto s = shx::DomainGraph::build(shx::DomainTag::Source, std::move(source_edges));
  auto t = shx::DomainGraph::build(shx::DomainTag::Target, std::move(target_edges));
  return shx::CrossDomainSystem(std::move(s), std::move(t));
}

/// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "shx-test-%08x", rd());
    path_ = std::filesystem::temp_directory_path() / buf;
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace shxtest
