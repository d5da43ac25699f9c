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

#ifndef EHRFLOW_PROBLEM_H_
#define EHRFLOW_PROBLEM_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/entityset.h"
#include "ehrflow/task.h"
#include "ehrflow/time.h"

namespace ehrflow {

enum class ProblemName {
  kNoShow,
  kLosClassification,
  kLosRegression,
  kReadmission,
  kDiagnosis,
  kMortality,
};

std::string_view ProblemNameString(ProblemName name);
std::optional<ProblemName> ParseProblemName(std::string_view name);

enum class Anchor { kEventStart, kEventEnd };

// External-cause code prefixes (ICD-9 E-codes and ICD-10 chapter XX) for
// transport accidents, intentional self-harm and assault.
const std::vector<std::string>& DefaultMortalityCodes();

struct ProblemParams {
  std::string start_variable;
  std::string end_variable;
  // Foreign key from the target to the patient (readmission grouping).
  std::string patient_variable = "patient";
  // Stored label column on the target; when loaded it is read instead of
  // running the labeling function.
  std::string label_variable;
  // Stored categorical values that mean a positive label (case-insensitive).
  std::vector<std::string> positive_values;
  std::optional<Duration> readmission_window;
  std::optional<int> threshold_days;
  std::optional<std::string> diagnosis_code;
  std::vector<std::string> mortality_codes;
  // Child resource holding per-encounter codes.
  std::string diagnosis_entity = "diagnosis";
  std::string code_variable = "code";
  // Child resource whose rows mark an attended appointment.
  std::string attendance_entity = "encounter";
};

struct ProblemSpec {
  ProblemName name = ProblemName::kReadmission;
  std::string target_entity;
  Anchor anchor = Anchor::kEventStart;
  Duration offset{0};
  ProblemParams params;
  TaskType task_type = TaskType::kBinary;

  // Spec with the documented defaults for `name`.
  static ProblemSpec Defaults(ProblemName name);

  // Throws kMissingParam when a required parameter is absent.
  void Validate() const;

  const std::string& AnchorVariable() const;
  // "entity.variable" names that encode the label and must not be used as
  // features.
  std::vector<std::string> LeakyVariables() const;

  nlohmann::json ToJson() const;
  static ProblemSpec FromJson(const nlohmann::json& j);
};

// Reads a problem block (YAML map with at least `name`); unspecified keys keep
// the defaults of that problem.
ProblemSpec ParseProblemSpec(std::string_view yaml_text);

struct LabelRow {
  std::string entity_id;
  Timestamp cutoff_time;
  double label = 0.0;

  bool operator==(const LabelRow&) const = default;
};

struct LabelTimes {
  ProblemSpec problem;
  std::vector<LabelRow> rows;
  size_t candidate_count = 0;
  // One note per excluded candidate row.
  std::vector<std::string> notes;

  size_t PositiveCount() const;
};

// Cutoff time of one target instance: anchor timestamp + offset. Throws
// kMissingAnchorTime when the anchor is null and kUnknownEntity when the id
// does not exist.
Timestamp Gct(const EntitySet& es, const ProblemSpec& spec,
              std::string_view entity_id);

// One row per target instance with a valid anchor and computable label, in
// target row order. Throws kUnknownTargetEntity and kMissingParam.
LabelTimes GenerateLabelTimes(const EntitySet& es, const ProblemSpec& spec);

// Writes `entity_id,cutoff_time,label` plus a `<stem>.meta.json` sidecar that
// records the problem spec.
void WriteLabelTimes(const std::filesystem::path& csv_path,
                     const LabelTimes& labels);
// Reads the CSV, and the sidecar when present.
LabelTimes ReadLabelTimes(const std::filesystem::path& csv_path);

std::filesystem::path LabelMetaPath(const std::filesystem::path& csv_path);

}  // namespace ehrflow

#endif  // EHRFLOW_PROBLEM_H_
