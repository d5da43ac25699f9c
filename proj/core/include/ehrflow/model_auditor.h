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

#ifndef EHRFLOW_MODEL_AUDITOR_H_
#define EHRFLOW_MODEL_AUDITOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/entityset.h"
#include "ehrflow/featurizer.h"
#include "ehrflow/problem.h"
#include "ehrflow/task.h"

namespace ehrflow {

struct Interval {
  double low = 0.0;
  double high = 0.0;
  size_t n_resamples = 0;
  uint64_t seed = 0;
  double level = 0.95;
};

struct MetricReport {
  TaskType task = TaskType::kBinary;
  // Null metrics (undefined AUC or R^2) are absent here and explained in notes.
  std::map<std::string, double> metrics;
  std::map<std::string, Interval> bootstrap;
  std::vector<std::string> notes;

  std::optional<double> Get(const std::string& name) const;
  nlohmann::json ToJson() const;
  std::string Render() const;
};

// Labels are 0/1. Metrics: accuracy, precision_0/1, recall_0/1, f1_0/1,
// precision_macro, recall_macro, f1_macro and, with scores, auc. A class with
// a zero denominator scores 0 with a note. AUC is the Mann-Whitney statistic
// with ties counted as 1/2. Throws kLengthMismatch and kInvalidArgument (empty
// input).
MetricReport ClassificationMetrics(const std::vector<double>& y_true,
                                   const std::vector<double>& y_pred,
                                   const std::vector<double>* y_score = nullptr);

// mse, mae and r2; r2 is null for constant y_true or fewer than 2 rows.
MetricReport RegressionMetrics(const std::vector<double>& y_true,
                               const std::vector<double>& y_pred);

// nullopt for AUC of a single-class y_true.
std::optional<double> Auc(const std::vector<double>& y_true,
                          const std::vector<double>& y_score);

// Scalar metric used for tuning: f1_macro, accuracy, auc, precision_macro,
// recall_macro (binary), r2, neg_mse, neg_mae (regression). Throws
// kDegenerateFold when the metric is undefined on this sample and
// kInvalidArgument for unknown names.
double ScoreMetric(const std::string& metric, const std::vector<double>& y_true,
                   const std::vector<double>& y_pred,
                   const std::vector<double>& y_score);
bool IsKnownMetric(const std::string& metric, TaskType task);
std::string DefaultMetric(TaskType task);

// Percentile interval from n_resamples paired resamples. Resamples where the
// metric is undefined are dropped. Throws kInvalidArgument for n_resamples <
// 100 or level outside (0, 1).
Interval BootstrapCi(const std::string& metric,
                     const std::vector<double>& y_true,
                     const std::vector<double>& y_pred,
                     const std::vector<double>& y_score, size_t n_resamples,
                     uint64_t seed, double level = 0.95);

struct MetadataReport {
  size_t loaded_variables = 0;
  size_t loaded_resources = 0;
  size_t training_examples = 0;
  std::optional<size_t> positive_count;
  std::optional<double> positive_pct;
  std::optional<double> negative_pct;
  size_t generated_features = 0;
  std::string problem;
  std::string target_entity;

  nlohmann::json ToJson() const;
  static MetadataReport FromJson(const nlohmann::json& j);
  std::string Render() const;
};

// Class ratios only for binary problems with at least one example.
MetadataReport BuildMetadataReport(const EntitySet& es, const LabelTimes& labels,
                                   size_t feature_count);

}  // namespace ehrflow

#endif  // EHRFLOW_MODEL_AUDITOR_H_
