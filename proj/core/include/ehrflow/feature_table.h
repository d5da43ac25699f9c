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

#ifndef EHRFLOW_FEATURE_TABLE_H_
#define EHRFLOW_FEATURE_TABLE_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ehrflow {

enum class OutputType { kNumeric, kCategorical, kBoolean };

std::string_view OutputTypeName(OutputType t);
std::optional<OutputType> ParseOutputType(std::string_view s);

// Null, number (booleans are 0/1) or category.
using FeatureValue = std::variant<std::monostate, double, std::string>;

inline bool IsNull(const FeatureValue& v) {
  return std::holds_alternative<std::monostate>(v);
}

struct FeatureColumn {
  std::string name;
  OutputType type = OutputType::kNumeric;
  std::vector<FeatureValue> values;
};

// Column-major table of typed feature values with explicit nulls.
struct FeatureTable {
  std::vector<FeatureColumn> columns;
  size_t rows = 0;

  // Row subset in the given order.
  FeatureTable Take(const std::vector<size_t>& row_indices) const;
  const FeatureColumn* Find(std::string_view name) const;
};

}  // namespace ehrflow

#endif  // EHRFLOW_FEATURE_TABLE_H_
