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

#ifndef EHRFLOW_FEATURIZER_H_
#define EHRFLOW_FEATURIZER_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/entityset.h"
#include "ehrflow/feature_table.h"
#include "ehrflow/problem.h"

namespace ehrflow {

enum class FeatureKind { kDirect, kTransform, kAggregation };

std::string_view FeatureKindName(FeatureKind k);

struct FeatureNode;
using FeatureNodePtr = std::shared_ptr<const FeatureNode>;

// Expression tree of one synthesized feature, rooted at `entity`.
struct FeatureNode {
  enum class Op {
    kIdentity,   // a column of `entity`
    kTransform,  // primitive applied to a datetime column of `entity`
    kAggregate,  // primitive over child rows linked through `relation`
    kParent,     // `input` evaluated on the parent row through `relation`
  };
  Op op = Op::kIdentity;
  std::string entity;
  std::string variable;
  std::string primitive;
  RelationshipDecl relation;
  FeatureNodePtr input;  // null for COUNT and leaves
  OutputType output_type = OutputType::kNumeric;
  int depth = 0;
  std::string name;  // relative to `entity`
};

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::kDirect;
  std::string primitive;  // "identity" for plain columns
  std::vector<RelationshipDecl> path;
  int depth = 0;
  OutputType output_type = OutputType::kNumeric;
  FeatureNodePtr root;

  nlohmann::json ToJson() const;
};

const std::vector<std::string>& DefaultAggregationPrimitives();
const std::vector<std::string>& DefaultTransformPrimitives();

struct FeaturizerSettings {
  int max_depth = 2;
  std::vector<std::string> agg_primitives = DefaultAggregationPrimitives();
  std::vector<std::string> transform_primitives = DefaultTransformPrimitives();
  // "entity.variable" names never used as features (label columns etc).
  std::vector<std::string> exclude;
  size_t jobs = 1;
};

// Rows visible at a cutoff: time-indexed rows with time <= cutoff; rows with a
// null time index are never visible; static entities are fully visible. The
// underlying entityset is not copied or modified.
class CutoffView {
 public:
  CutoffView(const EntitySet& es, Timestamp cutoff);

  bool Visible(const Entity& entity, size_t row) const;
  std::vector<size_t> VisibleRows(std::string_view entity) const;
  Timestamp cutoff() const { return cutoff_; }

 private:
  const EntitySet* es_;
  Timestamp cutoff_;
};

CutoffView ApplyCutoff(const EntitySet& es, Timestamp cutoff);

// Deterministic depth-bounded enumeration. Compatibility: sum, std, max, min,
// skew and mean take numeric inputs; count takes a child relation; mode takes
// categorical inputs; day, month, year and is_weekend take datetime columns.
// Throws kUnknownEntity and kInvalidArgument (unknown primitive).
std::vector<FeatureDef> EnumerateFeatures(const EntitySet& es,
                                          const std::string& target_entity,
                                          const FeaturizerSettings& settings);

struct FeatureMatrix {
  std::vector<FeatureDef> defs;  // empty when read back from CSV
  std::vector<std::string> entity_ids;
  std::vector<Timestamp> cutoffs;
  FeatureTable table;
};

// Cell (i, j) is defs[j] evaluated on ApplyCutoff(es, cutoff of row i).
// Empty groups give null, except COUNT which gives 0.
FeatureMatrix ComputeFeatureMatrix(const EntitySet& es,
                                   const LabelTimes& labels,
                                   const std::vector<FeatureDef>& defs,
                                   size_t jobs = 1);

// Applies one aggregation primitive to the non-null inputs of a group.
FeatureValue AggregateNumeric(std::string_view primitive,
                              const std::vector<double>& values);
FeatureValue AggregateMode(const std::vector<std::string>& values);

// CSV with header `entity_id,cutoff_time,<feature names>` plus the
// `<stem>.defs.json` feature manifest.
void WriteFeatureMatrix(const std::filesystem::path& csv_path,
                        const FeatureMatrix& matrix);
// Column types come from the manifest when present, otherwise a column is
// numeric iff every non-empty cell parses as a number.
FeatureMatrix ReadFeatureMatrix(const std::filesystem::path& csv_path);

std::filesystem::path FeatureManifestPath(const std::filesystem::path& csv_path);

}  // namespace ehrflow

#endif  // EHRFLOW_FEATURIZER_H_
