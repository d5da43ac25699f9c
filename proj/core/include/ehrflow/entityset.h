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

#ifndef EHRFLOW_ENTITYSET_H_
#define EHRFLOW_ENTITYSET_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/schema.h"
#include "ehrflow/time.h"

namespace ehrflow {

// One typed cell. std::monostate is null. Ids, foreign keys, categorical and
// text values are strings.
using Cell = std::variant<std::monostate, double, bool, Timestamp, std::string>;

inline bool IsNull(const Cell& c) {
  return std::holds_alternative<std::monostate>(c);
}

std::string CellToString(const Cell& c);

struct Column {
  VariableDecl decl;
  std::vector<Cell> cells;
};

// A loaded resource. All columns have row_count() cells; the index column is
// non-null and unique.
class Entity {
 public:
  Entity() = default;
  Entity(std::string name, std::string index,
         std::optional<std::string> time_index);

  const std::string& name() const { return name_; }
  const std::string& index() const { return index_; }
  const std::optional<std::string>& time_index() const { return time_index_; }
  size_t row_count() const { return row_count_; }
  const std::vector<Column>& columns() const { return columns_; }

  const Column* FindColumn(std::string_view var) const;
  Column* MutableColumn(std::string_view var);

  // The first column fixes row_count; later ones must match it.
  void AddColumn(Column column);
  // Rebuilds the id lookup. Throws kDuplicatePrimaryKey on repeats and
  // kInvalidArgument on a null id.
  void Reindex();

  std::optional<size_t> RowOf(std::string_view id) const;
  const std::string& IdAt(size_t row) const;
  std::optional<Timestamp> TimeAt(size_t row) const;

  void EraseRow(size_t row);

 private:
  std::string name_;
  std::string index_;
  std::optional<std::string> time_index_;
  size_t row_count_ = 0;
  std::vector<Column> columns_;
  std::unordered_map<std::string, size_t> row_of_id_;
};

enum class NoteKind {
  kMissingVariable,
  kMissingResource,
  kBrokenLink,
  kConsolidated,
  kCoercion,
};

std::string_view NoteKindName(NoteKind kind);

struct AssemblyNote {
  NoteKind kind;
  std::string subject;
  std::string detail;

  bool operator==(const AssemblyNote&) const = default;
};

struct EntitySet {
  std::shared_ptr<const SchemaRegistry> schema;
  std::map<std::string, Entity> entities;
  // Active relations only; child->parent edges over loaded entities.
  std::vector<RelationshipDecl> relations;
  std::vector<AssemblyNote> notes;

  const Entity* Find(std::string_view name) const;
  // Throws kUnknownEntity.
  const Entity& Get(std::string_view name) const;

  // Loaded non-index columns over all entities.
  size_t LoadedVariableCount() const;

  // FNV-1a over every cell, relation and note; equal sets hash equal.
  uint64_t Fingerprint() const;
};

// Entity/relation/note summary written by the assemble stage.
nlohmann::json ManifestJson(const EntitySet& es);

}  // namespace ehrflow

#endif  // EHRFLOW_ENTITYSET_H_
