/*
 * Copyright 2026 The ehrflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EHRFLOW_TESTS_TEST_UTIL_H_
#define EHRFLOW_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "ehrflow/assembler.h"
#include "ehrflow/csv.h"
#include "ehrflow/schema.h"

namespace ehrflow::testing {

inline std::filesystem::path DataDir() { return EHRFLOW_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ehrflow_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::map<std::string, CsvTable> Tables(
    const std::map<std::string, std::string>& csv_text) {
  std::map<std::string, CsvTable> out;
  for (const auto& [name, text] : csv_text) out[name] = ParseCsv(text);
  return out;
}

// Kahn's algorithm over child -> parent edges; true when every node is
// removed, i.e. the graph is acyclic.
inline bool TopologicalSortSucceeds(const std::vector<RelationshipDecl>& edges) {
  std::set<std::string> nodes;
  std::map<std::string, int> indegree;
  std::multimap<std::string, std::string> out;
  for (const auto& e : edges) {
    nodes.insert(e.child_resource);
    nodes.insert(e.parent_resource);
    out.emplace(e.child_resource, e.parent_resource);
    ++indegree[e.parent_resource];
  }
  std::queue<std::string> ready;
  for (const auto& n : nodes) {
    if (indegree[n] == 0) ready.push(n);
  }
  size_t removed = 0;
  while (!ready.empty()) {
    const std::string n = ready.front();
    ready.pop();
    ++removed;
    auto [b, e] = out.equal_range(n);
    for (auto it = b; it != e; ++it) {
      if (--indegree[it->second] == 0) ready.push(it->second);
    }
  }
  return removed == nodes.size();
}

}  // namespace ehrflow::testing

#endif  // EHRFLOW_TESTS_TEST_UTIL_H_
