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

#include "ehrflow/assembler.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "ehrflow/error.h"

namespace ehrflow {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseNumber(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> ParseBool(std::string_view s) {
  const std::string l = Lower(s);
  if (l == "true" || l == "t" || l == "yes" || l == "y" || l == "1") return true;
  if (l == "false" || l == "f" || l == "no" || l == "n" || l == "0") return false;
  return std::nullopt;
}

Entity LoadEntity(const ResourceSchema& res, const CsvTable& table,
                  const AssembleOptions& options,
                  std::vector<AssemblyNote>* notes) {
  std::map<std::string, size_t> header_pos;
  for (size_t i = 0; i < table.header.size(); ++i) {
    header_pos.emplace(Lower(Trim(table.header[i])), i);
  }

  const size_t n = table.rows.size();
  std::vector<Column> columns;
  std::vector<bool> keep(n, true);
  size_t dropped = 0;

  for (const auto& decl : res.variables) {
    auto pos = header_pos.find(Lower(decl.name));
    const bool is_index = decl.name == res.primary_key;
    if (pos == header_pos.end()) {
      if (is_index) {
        notes->push_back({NoteKind::kMissingVariable, res.name + "." + decl.name,
                          "primary key absent; row numbers used as index"});
        Column col{decl, {}};
        col.cells.reserve(n);
        for (size_t r = 0; r < n; ++r) col.cells.emplace_back(std::to_string(r));
        columns.push_back(std::move(col));
      } else {
        notes->push_back({NoteKind::kMissingVariable, res.name + "." + decl.name,
                          "not present in " + res.name + ".csv"});
      }
      continue;
    }
    Column col{decl, {}};
    col.cells.reserve(n);
    size_t bad = 0;
    for (size_t r = 0; r < n; ++r) {
      const std::string& raw = table.rows[r][pos->second];
      auto cell = CoerceCell(raw, decl.type);
      if (!cell) {
        if (options.strict) {
          throw Error(ErrorCode::kTypeCoercionError,
                      res.name + "." + decl.name + " row " + std::to_string(r) +
                          ": '" + raw + "' is not " +
                          std::string(SemanticTypeName(decl.type)));
        }
        ++bad;
        cell = Cell{};
      }
      if (is_index && IsNull(*cell)) {
        if (options.strict) {
          throw Error(ErrorCode::kTypeCoercionError,
                      res.name + "." + decl.name + " row " + std::to_string(r) +
                          " has a null primary key");
        }
        if (keep[r]) ++dropped;
        keep[r] = false;
      }
      col.cells.push_back(std::move(*cell));
    }
    if (bad > 0) {
      notes->push_back({NoteKind::kCoercion, res.name + "." + decl.name,
                        std::to_string(bad) + " cell(s) not readable as " +
                            std::string(SemanticTypeName(decl.type)) +
                            "; set to null"});
    }
    columns.push_back(std::move(col));
  }

  if (dropped > 0) {
    notes->push_back({NoteKind::kCoercion, res.name + "." + res.primary_key,
                      std::to_string(dropped) +
                          " row(s) without a primary key dropped"});
    for (auto& col : columns) {
      std::vector<Cell> kept;
      kept.reserve(n - dropped);
      for (size_t r = 0; r < n; ++r) {
        if (keep[r]) kept.push_back(std::move(col.cells[r]));
      }
      col.cells = std::move(kept);
    }
  }

  Entity entity(res.name, res.primary_key, res.time_index);
  for (auto& col : columns) entity.AddColumn(std::move(col));
  entity.Reindex();
  return entity;
}

void WireRelations(const SchemaRegistry& registry,
                   const AssembleOptions& options, EntitySet* es) {
  std::set<std::string> reported_missing;
  for (const auto& rel : registry.relations()) {
    auto child_it = es->entities.find(rel.child_resource);
    if (child_it == es->entities.end()) continue;
    Entity& child = child_it->second;
    const Entity* parent = es->Find(rel.parent_resource);
    if (parent == nullptr) {
      if (reported_missing.insert(rel.parent_resource).second) {
        es->notes.push_back({NoteKind::kMissingResource, rel.parent_resource,
                             "referenced by " + rel.child_resource +
                                 " but no file was loaded"});
      }
      es->notes.push_back({NoteKind::kBrokenLink, rel.ToString(),
                           "parent resource not loaded; relation dropped"});
      continue;
    }
    Column* fk = child.MutableColumn(rel.child_variable);
    if (fk == nullptr) {
      es->notes.push_back({NoteKind::kBrokenLink, rel.ToString(),
                           "foreign key not loaded; relation dropped"});
      continue;
    }
    size_t non_null = 0;
    std::vector<size_t> dangling;
    for (size_t r = 0; r < fk->cells.size(); ++r) {
      const auto* v = std::get_if<std::string>(&fk->cells[r]);
      if (v == nullptr) continue;
      ++non_null;
      if (!parent->RowOf(*v)) dangling.push_back(r);
    }
    if (dangling.empty()) {
      es->relations.push_back(rel);
      continue;
    }
    const double share =
        static_cast<double>(dangling.size()) / static_cast<double>(non_null);
    const std::string counts = std::to_string(dangling.size()) + " of " +
                               std::to_string(non_null);
    if (share < options.dangling_null_threshold) {
      for (size_t r : dangling) fk->cells[r] = Cell{};
      es->notes.push_back({NoteKind::kBrokenLink, rel.ToString(),
                           counts + " values reference missing rows; nulled"});
      es->relations.push_back(rel);
    } else {
      es->notes.push_back(
          {NoteKind::kBrokenLink, rel.ToString(),
           counts + " values reference missing rows; relation dropped"});
    }
  }
}

}  // namespace

std::optional<Cell> CoerceCell(std::string_view raw, SemanticType type) {
  const std::string_view text = Trim(raw);
  if (text.empty()) return Cell{};
  switch (type) {
    case SemanticType::kNumeric: {
      auto v = ParseNumber(text);
      if (!v) return std::nullopt;
      return Cell{*v};
    }
    case SemanticType::kBoolean: {
      auto v = ParseBool(text);
      if (!v) return std::nullopt;
      return Cell{*v};
    }
    case SemanticType::kDatetime: {
      auto v = ParseTimestamp(text);
      if (!v) return std::nullopt;
      return Cell{*v};
    }
    case SemanticType::kText:
      return Cell{std::string(raw)};
    case SemanticType::kId:
    case SemanticType::kForeignKey:
    case SemanticType::kCategorical:
      return Cell{std::string(text)};
  }
  return std::nullopt;
}

EntitySet AssembleTables(const std::map<std::string, CsvTable>& tables,
                         const SchemaRegistry& registry,
                         const AssembleOptions& options) {
  EntitySet es;
  es.schema = std::make_shared<const SchemaRegistry>(registry);
  bool any = false;
  for (const auto& [name, res] : registry.resources()) {
    auto it = tables.find(name);
    if (it == tables.end()) continue;
    any = true;
    es.entities.emplace(name, LoadEntity(res, it->second, options, &es.notes));
  }
  if (!any) {
    throw Error(ErrorCode::kNoRecognizedFiles,
                "no table matches a declared resource");
  }
  WireRelations(registry, options, &es);
  return ResolveCycles(std::move(es));
}

EntitySet Assemble(const std::filesystem::path& data_dir,
                   const SchemaRegistry& registry,
                   const AssembleOptions& options) {
  std::error_code ec;
  if (!std::filesystem::is_directory(data_dir, ec)) {
    throw Error(ErrorCode::kNoRecognizedFiles,
                data_dir.string() + " is not a directory");
  }
  std::map<std::string, std::string> by_lower;
  for (const auto& [name, res] : registry.resources()) {
    by_lower.emplace(Lower(name), name);
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
    if (entry.is_regular_file() && Lower(entry.path().extension().string()) == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::filesystem::path> chosen;
  for (const auto& f : files) {
    auto it = by_lower.find(Lower(f.stem().string()));
    if (it != by_lower.end()) chosen.emplace(it->second, f);
  }
  if (chosen.empty()) {
    throw Error(ErrorCode::kNoRecognizedFiles,
                "no CSV file in " + data_dir.string() +
                    " matches a declared resource");
  }
  std::map<std::string, CsvTable> tables;
  for (const auto& [name, path] : chosen) tables.emplace(name, ReadCsv(path));
  return AssembleTables(tables, registry, options);
}

std::vector<RelationshipDecl> FindCycle(
    const std::vector<RelationshipDecl>& relations) {
  std::map<std::string, std::vector<const RelationshipDecl*>> out_edges;
  for (const auto& r : relations) {
    out_edges[r.child_resource].push_back(&r);
    out_edges.try_emplace(r.parent_resource);
  }
  for (auto& [node, edges] : out_edges) {
    std::sort(edges.begin(), edges.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
  }

  enum class Color { kWhite, kGray, kBlack };
  std::map<std::string, Color> color;
  for (const auto& [node, edges] : out_edges) color[node] = Color::kWhite;

  struct Frame {
    std::string node;
    size_t next_edge;
  };
  for (const auto& [start, unused] : out_edges) {
    if (color[start] != Color::kWhite) continue;
    std::vector<Frame> stack{{start, 0}};
    std::vector<const RelationshipDecl*> path;
    color[start] = Color::kGray;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& edges = out_edges[top.node];
      if (top.next_edge == edges.size()) {
        color[top.node] = Color::kBlack;
        stack.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      const RelationshipDecl* e = edges[top.next_edge++];
      const std::string& next = e->parent_resource;
      if (color[next] == Color::kGray) {
        std::vector<RelationshipDecl> cycle;
        size_t first = path.size();
        while (first > 0 && path[first - 1]->child_resource != next) --first;
        if (first > 0) --first;
        if (e->child_resource == next) first = path.size();
        for (size_t i = first; i < path.size(); ++i) cycle.push_back(*path[i]);
        cycle.push_back(*e);
        return cycle;
      }
      if (color[next] == Color::kWhite) {
        color[next] = Color::kGray;
        path.push_back(e);
        stack.push_back({next, 0});
      }
    }
  }
  return {};
}

EntitySet ResolveCycles(EntitySet es) {
  while (true) {
    auto cycle = FindCycle(es.relations);
    if (cycle.empty()) break;
    const RelationshipDecl victim = *std::max_element(cycle.begin(), cycle.end());
    std::string trail = cycle.front().child_resource;
    for (const auto& e : cycle) trail += " -> " + e.parent_resource;
    es.relations.erase(
        std::find(es.relations.begin(), es.relations.end(), victim));
    es.notes.push_back({NoteKind::kConsolidated, victim.ToString(),
                        "removed to break cycle " + trail});
  }
  return es;
}

}  // namespace ehrflow
