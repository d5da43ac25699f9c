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

#ifndef EHRFLOW_WORKFLOW_H_
#define EHRFLOW_WORKFLOW_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehrflow/assembler.h"
#include "ehrflow/automl/pipeline.h"
#include "ehrflow/automl/tuner.h"
#include "ehrflow/data_auditor.h"
#include "ehrflow/entityset.h"
#include "ehrflow/error.h"
#include "ehrflow/featurizer.h"
#include "ehrflow/model_auditor.h"
#include "ehrflow/problem.h"

namespace ehrflow {

struct AutomlSettings {
  size_t budget = 100;
  size_t cv = 10;
  std::string metric;  // empty: task default
  uint64_t seed = 42;
  double ratio = 0.8;
  std::vector<std::string> estimators;  // empty: every registered one
  size_t bootstrap = 1000;              // 0 disables intervals
};

struct RunConfig {
  std::filesystem::path schema;
  std::filesystem::path data;
  std::filesystem::path output;
  std::optional<std::filesystem::path> expectations;
  std::vector<std::string> cohort;  // "entity.variable"
  ProblemSpec problem = ProblemSpec::Defaults(ProblemName::kNoShow);
  FeaturizerSettings featurizer;
  AutomlSettings automl;
  AssembleOptions assemble;
  size_t jobs = 1;

  // Paths in the file resolve against the file's directory. Throws
  // kParseError and kMissingParam.
  static RunConfig FromYaml(std::string_view text,
                            const std::filesystem::path& base_dir = {});
  static RunConfig Load(const std::filesystem::path& path);
};

// Artifact names inside the output directory.
namespace artifacts {
inline constexpr char kManifest[] = "manifest.json";
inline constexpr char kAuditJson[] = "audit.json";
inline constexpr char kAuditText[] = "audit.txt";
inline constexpr char kLabels[] = "labels.csv";
inline constexpr char kFeatures[] = "features.csv";
inline constexpr char kMetadata[] = "metadata.json";
inline constexpr char kTrials[] = "trials.csv";
inline constexpr char kModel[] = "model.json";
inline constexpr char kTestFeatures[] = "test_features.csv";
inline constexpr char kTestLabels[] = "test_labels.csv";
inline constexpr char kMetricsJson[] = "metrics.json";
inline constexpr char kMetricsText[] = "metrics.txt";
inline constexpr char kPredictions[] = "predictions.csv";
}  // namespace artifacts

// A stage error: "<stage>: <ErrorName>: <detail>".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const { return stage_; }
  ErrorCode code() const { return code_; }

 private:
  std::string stage_;
  ErrorCode code_;
};

EntitySet RunAssemble(const std::filesystem::path& schema,
                      const std::filesystem::path& data,
                      const std::filesystem::path& out,
                      const AssembleOptions& options = {});

DataAuditReport RunAudit(const EntitySet& es, const ExpectationSet* expectations,
                         const std::vector<std::string>& cohort,
                         const std::filesystem::path& out);

LabelTimes RunLabel(const EntitySet& es, const ProblemSpec& problem,
                    const std::filesystem::path& out);

// Excludes the problem's leaky variables; also writes metadata.json.
FeatureMatrix RunFeaturize(const EntitySet& es, const LabelTimes& labels,
                           FeaturizerSettings settings,
                           const std::filesystem::path& out);

struct TrainOutcome {
  automl::TuneResult tuning;
  automl::FittedPipeline model;
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
};

// Stratified split, tuning with k-fold CV inside the training part, refit of
// the best pipeline on the whole training part. Writes trials.csv, model.json,
// test_features.csv and test_labels.csv.
TrainOutcome RunTrain(const FeatureMatrix& features, const LabelTimes& labels,
                      const AutomlSettings& settings, size_t jobs,
                      const std::filesystem::path& out);

// Scores the model on held-out rows; writes metrics.json and metrics.txt.
MetricReport RunReport(const automl::FittedPipeline& model,
                       const FeatureMatrix& test_features,
                       const LabelTimes& test_labels, size_t bootstrap,
                       uint64_t seed, const std::filesystem::path& out);

// Writes `entity_id,cutoff_time,prediction,score`.
void RunPredict(const automl::FittedPipeline& model, const FeatureMatrix& features,
                const std::filesystem::path& out_csv);

// All stages in order. Throws StageError naming the failing stage.
void RunPipeline(const RunConfig& config);

// Rows of `labels` and `features` must describe the same examples in order.
void CheckAligned(const FeatureMatrix& features, const LabelTimes& labels);

Eigen::VectorXd LabelVector(const LabelTimes& labels);

}  // namespace ehrflow

#endif  // EHRFLOW_WORKFLOW_H_
