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

#ifndef EHRFLOW_ASSEMBLER_H_
#define EHRFLOW_ASSEMBLER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehrflow/csv.h"
#include "ehrflow/entityset.h"
#include "ehrflow/schema.h"

namespace ehrflow {

struct AssembleOptions {
  // Uncoercible cells raise kTypeCoercionError instead of becoming null.
  bool strict = false;
  // Foreign keys whose dangling share is below this are nulled per cell;
  // otherwise the whole relation is dropped.
  double dangling_null_threshold = 0.05;
};

// Converts one raw CSV cell to `type`. Empty text is null; nullopt means the
// text cannot be read as that type.
std::optional<Cell> CoerceCell(std::string_view raw, SemanticType type);

// Loads every `<resource>.csv` (case-insensitive) in `data_dir` that names a
// declared resource. Never fails because a resource or variable is absent;
// absences are recorded as notes. Throws kNoRecognizedFiles,
// kTypeCoercionError (strict mode) and kDuplicatePrimaryKey.
EntitySet Assemble(const std::filesystem::path& data_dir,
                   const SchemaRegistry& registry,
                   const AssembleOptions& options = {});

// Same as Assemble over already-parsed tables keyed by resource name.
EntitySet AssembleTables(const std::map<std::string, CsvTable>& tables,
                         const SchemaRegistry& registry,
                         const AssembleOptions& options = {});

// Breaks every directed cycle among the active relations. Each cycle loses
// the edge with the greatest (child_resource, child_variable); every removal
// is recorded as a kConsolidated note whose subject is the removed edge.
EntitySet ResolveCycles(EntitySet entityset);

// Edges of one directed cycle (in traversal order), or empty if acyclic.
std::vector<RelationshipDecl> FindCycle(
    const std::vector<RelationshipDecl>& relations);

}  // namespace ehrflow

#endif  // EHRFLOW_ASSEMBLER_H_
