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

#ifndef EHRFLOW_DATA_AUDITOR_H_
#define EHRFLOW_DATA_AUDITOR_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/entityset.h"

namespace ehrflow {

struct QualityFinding {
  std::string entity;
  std::string variable;
  size_t row_count = 0;
  size_t missing_count = 0;
  double missing_pct = 0.0;  // fraction in [0, 1]
};

// Population standard deviation (divides by n).
struct NumericSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

struct CategoricalSummary {
  size_t unique_count = 0;
  // value -> fraction of non-null cells, sorted by value.
  std::vector<std::pair<std::string, double>> frequencies;
};

struct DatetimeSummary {
  Timestamp min;
  Timestamp max;
};

struct DistributionFinding {
  std::string entity;
  std::string variable;
  size_t non_null = 0;
  // monostate when the column has no non-null cells.
  std::variant<std::monostate, NumericSummary, CategoricalSummary,
               DatetimeSummary>
      summary;
  std::vector<std::string> violations;
};

struct Expectation {
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::vector<std::string>> allowed;
  std::optional<size_t> max_unique;
};

// entity -> variable -> bounds.
using ExpectationSet = std::map<std::string, std::map<std::string, Expectation>>;

// Parses the YAML expectations file:
//   expectations:
//     patient:
//       age: {min: 0, max: 120}
//       gender: {allowed: [F, M]}
ExpectationSet ParseExpectations(std::string_view yaml_text);
ExpectationSet LoadExpectations(const std::filesystem::path& path);

// One finding per (entity, variable) loaded in the entityset.
std::vector<QualityFinding> AuditQuality(const EntitySet& es);

// One finding per numeric, categorical, boolean and datetime variable.
// Ids, foreign keys and text get quality findings only. Throws
// kUnknownVariableInExpectations when an expectation names a variable that is
// not declared in the entityset's schema.
std::vector<DistributionFinding> AuditDistributions(
    const EntitySet& es, const ExpectationSet* expectations = nullptr);

struct CohortRow {
  std::string variable;  // "entity.variable"
  size_t non_null = 0;
  std::optional<double> negative_pct;  // percent, 0..100
  std::optional<double> positive_pct;
};

// Negative/positive split of boolean or 0/1-coded variables, named as
// "entity.variable". Throws kNonBinaryVariable.
std::vector<CohortRow> CohortSummary(const EntitySet& es,
                                     const std::vector<std::string>& variables);

struct DataAuditReport {
  std::vector<QualityFinding> quality;
  std::vector<DistributionFinding> distributions;
  std::vector<CohortRow> cohort;

  nlohmann::json ToJson() const;
  std::string Render() const;
};

}  // namespace ehrflow

#endif  // EHRFLOW_DATA_AUDITOR_H_
