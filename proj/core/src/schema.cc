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

#include "ehrflow/schema.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ehrflow/error.h"

namespace ehrflow {
namespace {

constexpr std::pair<SemanticType, std::string_view> kTypeNames[] = {
    {SemanticType::kId, "id"},
    {SemanticType::kForeignKey, "foreign_key"},
    {SemanticType::kNumeric, "numeric"},
    {SemanticType::kCategorical, "categorical"},
    {SemanticType::kDatetime, "datetime"},
    {SemanticType::kBoolean, "boolean"},
    {SemanticType::kText, "text"},
};

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

bool SplitQualified(std::string_view text, std::string* resource,
                    std::string* variable) {
  text = TrimView(text);
  const size_t dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size()) {
    return false;
  }
  if (text.find('.', dot + 1) != std::string_view::npos) return false;
  *resource = std::string(text.substr(0, dot));
  *variable = std::string(text.substr(dot + 1));
  return true;
}

}  // namespace

std::string_view SemanticTypeName(SemanticType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<SemanticType> ParseSemanticType(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

const VariableDecl* ResourceSchema::FindVariable(std::string_view var) const {
  for (const auto& v : variables) {
    if (v.name == var) return &v;
  }
  return nullptr;
}

std::string RelationshipDecl::ToString() const {
  return child_resource + "." + child_variable + " -> " + parent_resource +
         "." + parent_variable;
}

std::optional<RelationshipDecl> ParseRelationship(std::string_view text) {
  const size_t arrow = text.find("->");
  if (arrow == std::string_view::npos) return std::nullopt;
  RelationshipDecl rel;
  if (!SplitQualified(text.substr(0, arrow), &rel.child_resource,
                      &rel.child_variable) ||
      !SplitQualified(text.substr(arrow + 2), &rel.parent_resource,
                      &rel.parent_variable)) {
    return std::nullopt;
  }
  return rel;
}

SchemaRegistry::SchemaRegistry(std::vector<ResourceSchema> resources,
                               std::vector<RelationshipDecl> relations)
    : relations_(std::move(relations)) {
  for (auto& res : resources) {
    if (res.name.empty()) {
      throw Error(ErrorCode::kInvalidSchema, "resource with empty name");
    }
    std::set<std::string> names;
    size_t id_count = 0;
    for (auto& v : res.variables) {
      if (!names.insert(v.name).second) {
        throw Error(ErrorCode::kInvalidSchema,
                    "duplicate variable " + res.name + "." + v.name);
      }
      if (v.type == SemanticType::kId) ++id_count;
    }
    const VariableDecl* pk = res.FindVariable(res.primary_key);
    if (pk == nullptr) {
      throw Error(ErrorCode::kInvalidSchema,
                  "resource " + res.name + " has no declared primary key");
    }
    if (pk->type != SemanticType::kId) {
      throw Error(ErrorCode::kInvalidSchema,
                  "primary key " + res.name + "." + res.primary_key +
                      " must have type id");
    }
    if (id_count != 1) {
      throw Error(ErrorCode::kDuplicatePrimaryKey,
                  "resource " + res.name + " declares " +
                      std::to_string(id_count) + " id variables");
    }
    for (auto& v : res.variables) {
      if (v.name == res.primary_key) v.nullable = false;
    }
    if (res.time_index) {
      const VariableDecl* ti = res.FindVariable(*res.time_index);
      if (ti == nullptr || ti->type != SemanticType::kDatetime) {
        throw Error(ErrorCode::kInvalidSchema,
                    "time_index " + res.name + "." + *res.time_index +
                        " must be a declared datetime variable");
      }
    }
    const std::string name = res.name;
    if (!resources_.emplace(name, std::move(res)).second) {
      throw Error(ErrorCode::kInvalidSchema, "duplicate resource " + name);
    }
  }

  std::set<RelationshipDecl> seen;
  for (const auto& rel : relations_) {
    const ResourceSchema* child = FindResource(rel.child_resource);
    const ResourceSchema* parent = FindResource(rel.parent_resource);
    if (child == nullptr || parent == nullptr) {
      throw Error(ErrorCode::kDanglingReference,
                  rel.ToString() + " names an undeclared resource");
    }
    const VariableDecl* cv = child->FindVariable(rel.child_variable);
    const VariableDecl* pv = parent->FindVariable(rel.parent_variable);
    if (cv == nullptr || pv == nullptr) {
      throw Error(ErrorCode::kDanglingReference,
                  rel.ToString() + " names an undeclared variable");
    }
    if (cv->type != SemanticType::kForeignKey) {
      throw Error(ErrorCode::kInvalidSchema,
                  rel.ToString() + ": child variable is not a foreign_key");
    }
    if (rel.parent_variable != parent->primary_key) {
      throw Error(ErrorCode::kInvalidSchema,
                  rel.ToString() + ": parent variable is not the primary key");
    }
    if (!seen.insert(rel).second) {
      throw Error(ErrorCode::kInvalidSchema,
                  "duplicate relation " + rel.ToString());
    }
  }
}

const ResourceSchema* SchemaRegistry::FindResource(std::string_view name) const {
  auto it = resources_.find(std::string(name));
  return it == resources_.end() ? nullptr : &it->second;
}

std::vector<RelationshipDecl> SchemaRegistry::RelationsFor(
    std::string_view resource) const {
  if (FindResource(resource) == nullptr) {
    throw Error(ErrorCode::kUnknownResource, std::string(resource));
  }
  std::vector<RelationshipDecl> out;
  for (const auto& rel : relations_) {
    if (rel.child_resource == resource) out.push_back(rel);
  }
  return out;
}

SchemaRegistry SchemaRegistry::FromYaml(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!root.IsMap() || !root["resources"] || !root["resources"].IsMap()) {
    throw Error(ErrorCode::kParseError, "missing top-level 'resources' map");
  }
  std::vector<ResourceSchema> resources;
  std::vector<RelationshipDecl> relations;
  try {
    for (const auto& entry : root["resources"]) {
      ResourceSchema res;
      res.name = entry.first.as<std::string>();
      const YAML::Node& body = entry.second;
      if (!body.IsMap() || !body["variables"] || !body["variables"].IsMap()) {
        throw Error(ErrorCode::kParseError,
                    "resource " + res.name + " needs a 'variables' map");
      }
      if (!body["primary_key"]) {
        throw Error(ErrorCode::kParseError,
                    "resource " + res.name + " needs 'primary_key'");
      }
      res.primary_key = body["primary_key"].as<std::string>();
      if (body["time_index"]) res.time_index = body["time_index"].as<std::string>();
      std::set<std::string> required;
      if (body["required"]) {
        for (const auto& r : body["required"]) required.insert(r.as<std::string>());
      }
      for (const auto& var : body["variables"]) {
        VariableDecl decl;
        decl.name = var.first.as<std::string>();
        const std::string type_name = var.second.as<std::string>();
        auto type = ParseSemanticType(type_name);
        if (!type) {
          throw Error(ErrorCode::kParseError, "unknown type '" + type_name +
                                                  "' for " + res.name + "." +
                                                  decl.name);
        }
        decl.type = *type;
        decl.nullable = required.count(decl.name) == 0;
        res.variables.push_back(std::move(decl));
      }
      for (const auto& r : required) {
        if (res.FindVariable(r) == nullptr) {
          throw Error(ErrorCode::kDanglingReference,
                      "required variable " + res.name + "." + r +
                          " is not declared");
        }
      }
      resources.push_back(std::move(res));
    }
    if (root["relations"]) {
      for (const auto& r : root["relations"]) {
        const std::string text = r.as<std::string>();
        auto rel = ParseRelationship(text);
        if (!rel) {
          throw Error(ErrorCode::kParseError, "bad relation '" + text + "'");
        }
        relations.push_back(*rel);
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return SchemaRegistry(std::move(resources), std::move(relations));
}

std::string SchemaRegistry::ToYaml() const {
  YAML::Emitter out;
  out << YAML::BeginMap << YAML::Key << "resources" << YAML::Value
      << YAML::BeginMap;
  for (const auto& [name, res] : resources_) {
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "primary_key" << YAML::Value << res.primary_key;
    if (res.time_index) {
      out << YAML::Key << "time_index" << YAML::Value << *res.time_index;
    }
    std::vector<std::string> required;
    for (const auto& v : res.variables) {
      if (!v.nullable && v.name != res.primary_key) required.push_back(v.name);
    }
    if (!required.empty()) {
      out << YAML::Key << "required" << YAML::Value << YAML::Flow << required;
    }
    out << YAML::Key << "variables" << YAML::Value << YAML::BeginMap;
    for (const auto& v : res.variables) {
      out << YAML::Key << v.name << YAML::Value
          << std::string(SemanticTypeName(v.type));
    }
    out << YAML::EndMap << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "relations" << YAML::Value << YAML::BeginSeq;
  for (const auto& rel : relations_) out << rel.ToString();
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

SchemaRegistry LoadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot read schema " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return SchemaRegistry::FromYaml(buf.str());
}

}  // namespace ehrflow
