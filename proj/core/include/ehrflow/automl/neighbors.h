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

#ifndef EHRFLOW_AUTOML_NEIGHBORS_H_
#define EHRFLOW_AUTOML_NEIGHBORS_H_

#include "ehrflow/automl/estimator.h"

namespace ehrflow::automl {

// Brute-force Euclidean k-nearest neighbors. Distance ties go to the lower
// training row. Binary votes tied at k/2 take the nearest neighbor's label.
class KNeighbors : public Estimator {
 public:
  KNeighbors(TaskType task, int k = 5) : task_(task), k_(k) {}

  std::string name() const override { return "knn"; }
  TaskType task() const override { return task_; }
  void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           uint64_t seed) override;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd Score(const Eigen::MatrixXd& x) const override;
  nlohmann::json ToJson() const override;
  void LoadJson(const nlohmann::json& j) override;

 private:
  // Mean label of the neighbors and label of the nearest one, per row.
  void Query(const Eigen::MatrixXd& x, Eigen::VectorXd* mean,
             Eigen::VectorXd* nearest) const;

  TaskType task_;
  int k_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_NEIGHBORS_H_
