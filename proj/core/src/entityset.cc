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

#include "ehrflow/entityset.h"

#include <cstring>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow {

std::string CellToString(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return FormatDouble(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(Timestamp t) const { return FormatTimestamp(t); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

Entity::Entity(std::string name, std::string index,
               std::optional<std::string> time_index)
    : name_(std::move(name)),
      index_(std::move(index)),
      time_index_(std::move(time_index)) {}

const Column* Entity::FindColumn(std::string_view var) const {
  for (const auto& c : columns_) {
    if (c.decl.name == var) return &c;
  }
  return nullptr;
}

Column* Entity::MutableColumn(std::string_view var) {
  for (auto& c : columns_) {
    if (c.decl.name == var) return &c;
  }
  return nullptr;
}

void Entity::AddColumn(Column column) {
  if (FindColumn(column.decl.name) != nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate column " + name_ + "." + column.decl.name);
  }
  if (columns_.empty()) {
    row_count_ = column.cells.size();
  } else if (column.cells.size() != row_count_) {
    throw Error(ErrorCode::kInvalidArgument,
                "column " + name_ + "." + column.decl.name + " has " +
                    std::to_string(column.cells.size()) + " rows, expected " +
                    std::to_string(row_count_));
  }
  columns_.push_back(std::move(column));
}

void Entity::Reindex() {
  row_of_id_.clear();
  const Column* idx = FindColumn(index_);
  if (idx == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "entity " + name_ + " has no index column " + index_);
  }
  row_of_id_.reserve(row_count_);
  for (size_t r = 0; r < row_count_; ++r) {
    const auto* id = std::get_if<std::string>(&idx->cells[r]);
    if (id == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "null primary key in " + name_ + " row " + std::to_string(r));
    }
    if (!row_of_id_.emplace(*id, r).second) {
      throw Error(ErrorCode::kDuplicatePrimaryKey,
                  name_ + "." + index_ + " repeats '" + *id + "'");
    }
  }
}

std::optional<size_t> Entity::RowOf(std::string_view id) const {
  auto it = row_of_id_.find(std::string(id));
  if (it == row_of_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Entity::IdAt(size_t row) const {
  return std::get<std::string>(FindColumn(index_)->cells.at(row));
}

std::optional<Timestamp> Entity::TimeAt(size_t row) const {
  if (!time_index_) return std::nullopt;
  const Column* col = FindColumn(*time_index_);
  if (col == nullptr) return std::nullopt;
  if (const auto* t = std::get_if<Timestamp>(&col->cells.at(row))) return *t;
  return std::nullopt;
}

void Entity::EraseRow(size_t row) {
  for (auto& c : columns_) {
    c.cells.erase(c.cells.begin() + static_cast<std::ptrdiff_t>(row));
  }
  --row_count_;
  Reindex();
}

std::string_view NoteKindName(NoteKind kind) {
  switch (kind) {
    case NoteKind::kMissingVariable: return "missing_variable";
    case NoteKind::kMissingResource: return "missing_resource";
    case NoteKind::kBrokenLink: return "broken_link";
    case NoteKind::kConsolidated: return "consolidated";
    case NoteKind::kCoercion: return "coercion";
  }
  return "unknown";
}

const Entity* EntitySet::Find(std::string_view name) const {
  auto it = entities.find(std::string(name));
  return it == entities.end() ? nullptr : &it->second;
}

const Entity& EntitySet::Get(std::string_view name) const {
  const Entity* e = Find(name);
  if (e == nullptr) throw Error(ErrorCode::kUnknownEntity, std::string(name));
  return *e;
}

size_t EntitySet::LoadedVariableCount() const {
  size_t n = 0;
  for (const auto& [name, e] : entities) {
    for (const auto& c : e.columns()) {
      if (c.decl.name != e.index()) ++n;
    }
  }
  return n;
}

namespace {

struct Fnv1a {
  uint64_t h = 1469598103934665603ULL;
  void Bytes(const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  }
  void Str(std::string_view s) {
    const uint64_t n = s.size();
    Bytes(&n, sizeof(n));
    Bytes(s.data(), s.size());
  }
  template <typename T>
  void Pod(T v) {
    Bytes(&v, sizeof(v));
  }
};

}  // namespace

uint64_t EntitySet::Fingerprint() const {
  Fnv1a f;
  for (const auto& [name, e] : entities) {
    f.Str(name);
    f.Pod(e.row_count());
    for (const auto& c : e.columns()) {
      f.Str(c.decl.name);
      for (const auto& cell : c.cells) {
        f.Pod(cell.index());
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::string>) {
                f.Str(v);
              } else if constexpr (std::is_same_v<T, Timestamp>) {
                f.Pod(v.time_since_epoch().count());
              } else if constexpr (!std::is_same_v<T, std::monostate>) {
                f.Pod(v);
              }
            },
            cell);
      }
    }
  }
  for (const auto& r : relations) f.Str(r.ToString());
  for (const auto& n : notes) {
    f.Pod(static_cast<int>(n.kind));
    f.Str(n.subject);
    f.Str(n.detail);
  }
  return f.h;
}

nlohmann::json ManifestJson(const EntitySet& es) {
  nlohmann::json entities = nlohmann::json::array();
  for (const auto& [name, e] : es.entities) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& c : e.columns()) {
      vars.push_back({{"name", c.decl.name},
                      {"type", std::string(SemanticTypeName(c.decl.type))}});
    }
    nlohmann::json ent = {{"name", name},
                          {"rows", e.row_count()},
                          {"index", e.index()},
                          {"variables", vars}};
    if (e.time_index()) ent["time_index"] = *e.time_index();
    entities.push_back(std::move(ent));
  }
  nlohmann::json relations = nlohmann::json::array();
  for (const auto& r : es.relations) relations.push_back(r.ToString());
  nlohmann::json notes = nlohmann::json::array();
  for (const auto& n : es.notes) {
    notes.push_back({{"kind", std::string(NoteKindName(n.kind))},
                     {"subject", n.subject},
                     {"detail", n.detail}});
  }
  return {{"loaded_resources", es.entities.size()},
          {"loaded_variables", es.LoadedVariableCount()},
          {"entities", entities},
          {"relations", relations},
          {"notes", notes}};
}

}  // namespace ehrflow
