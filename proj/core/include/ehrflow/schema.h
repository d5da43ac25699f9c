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

#ifndef EHRFLOW_SCHEMA_H_
#define EHRFLOW_SCHEMA_H_

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ehrflow {

enum class SemanticType {
  kId,
  kForeignKey,
  kNumeric,
  kCategorical,
  kDatetime,
  kBoolean,
  kText,
};

std::string_view SemanticTypeName(SemanticType type);
std::optional<SemanticType> ParseSemanticType(std::string_view name);

struct VariableDecl {
  std::string name;
  SemanticType type = SemanticType::kCategorical;
  bool nullable = true;

  bool operator==(const VariableDecl&) const = default;
};

struct ResourceSchema {
  std::string name;
  std::vector<VariableDecl> variables;
  std::string primary_key;
  // Datetime variable used for cutoff truncation. Resources without one are
  // static: every row is visible at every cutoff.
  std::optional<std::string> time_index;

  const VariableDecl* FindVariable(std::string_view var) const;

  bool operator==(const ResourceSchema&) const = default;
};

// child_resource.child_variable -> parent_resource.parent_variable, where the
// child variable is a foreign key and the parent variable is the parent's
// primary key (many-to-one).
struct RelationshipDecl {
  std::string child_resource;
  std::string child_variable;
  std::string parent_resource;
  std::string parent_variable;

  std::string ToString() const;
  auto operator<=>(const RelationshipDecl&) const = default;
};

// Parses "child.var -> parent.var".
std::optional<RelationshipDecl> ParseRelationship(std::string_view text);

// Immutable after construction; safe to share across threads.
class SchemaRegistry {
 public:
  SchemaRegistry() = default;

  // Validates and builds a registry. Throws Error with kDanglingReference,
  // kDuplicatePrimaryKey or kInvalidSchema.
  SchemaRegistry(std::vector<ResourceSchema> resources,
                 std::vector<RelationshipDecl> relations);

  static SchemaRegistry FromYaml(std::string_view text);
  std::string ToYaml() const;

  const std::map<std::string, ResourceSchema>& resources() const {
    return resources_;
  }
  const std::vector<RelationshipDecl>& relations() const { return relations_; }

  const ResourceSchema* FindResource(std::string_view name) const;

  // All declared relations whose child is `resource`. Throws kUnknownResource.
  std::vector<RelationshipDecl> RelationsFor(std::string_view resource) const;

  bool operator==(const SchemaRegistry&) const = default;

 private:
  std::map<std::string, ResourceSchema> resources_;
  std::vector<RelationshipDecl> relations_;
};

SchemaRegistry LoadSchema(const std::filesystem::path& path);

}  // namespace ehrflow

#endif  // EHRFLOW_SCHEMA_H_
