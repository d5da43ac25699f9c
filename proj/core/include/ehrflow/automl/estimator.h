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

#ifndef EHRFLOW_AUTOML_ESTIMATOR_H_
#define EHRFLOW_AUTOML_ESTIMATOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ehrflow/automl/params.h"
#include "ehrflow/task.h"

namespace ehrflow::automl {

// Binary labels are 0/1. Fit throws kSingularFit when the training labels of
// a binary task hold a single class.
class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual std::string name() const = 0;
  virtual TaskType task() const = 0;
  virtual void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   uint64_t seed) = 0;
  // Class labels for binary tasks, values for regression.
  virtual Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const = 0;
  // Positive-class probability (binary tasks); regression returns Predict.
  virtual Eigen::VectorXd Score(const Eigen::MatrixXd& x) const = 0;

  virtual nlohmann::json ToJson() const = 0;
  virtual void LoadJson(const nlohmann::json& j) = 0;
};

using EstimatorFactory =
    std::function<std::unique_ptr<Estimator>(const ParamMap&, TaskType)>;

struct EstimatorEntry {
  std::string name;
  std::vector<TaskType> tasks;
  EstimatorFactory factory;
  // Dimensions named without the "<name>." prefix.
  std::vector<Dimension> space;
};

// Open set of estimator primitives; the reference entries are lr, knn, gnb,
// gb and ridge.
class EstimatorRegistry {
 public:
  static EstimatorRegistry& Global();

  void Register(EstimatorEntry entry);
  const EstimatorEntry* Find(const std::string& name) const;
  std::vector<std::string> Names(TaskType task) const;

 private:
  std::vector<EstimatorEntry> entries_;
};

// Throws kInvalidArgument for unknown names or a task the estimator lacks.
std::unique_ptr<Estimator> MakeEstimator(const std::string& name,
                                         const ParamMap& params, TaskType task);
std::unique_ptr<Estimator> EstimatorFromJson(const nlohmann::json& j);

// Joint space: an "estimator" choice plus "<name>.<param>" dimensions for every
// listed estimator. An empty list means every registered estimator for task.
HyperparamSpace DefaultSpace(TaskType task,
                             const std::vector<std::string>& estimators = {});
// Params of the chosen estimator with the prefix stripped.
ParamMap EstimatorParams(const ParamMap& joint, const std::string& estimator);

void CheckBinaryLabels(const Eigen::VectorXd& y);

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_ESTIMATOR_H_
