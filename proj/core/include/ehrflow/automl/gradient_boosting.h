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

#ifndef EHRFLOW_AUTOML_GRADIENT_BOOSTING_H_
#define EHRFLOW_AUTOML_GRADIENT_BOOSTING_H_

#include <vector>

#include "ehrflow/automl/estimator.h"

namespace ehrflow::automl {

struct GbSettings {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 1;
  double l2 = 1.0;
  int max_bins = 64;
};

// Gradient-boosted regression trees on binned features. Log loss for binary
// tasks, squared error for regression. Leaf values are Newton steps; each
// round's shrinkage is halved until the training loss does not increase, and
// a round that cannot decrease it contributes nothing.
class GradientBoosting : public Estimator {
 public:
  GradientBoosting(TaskType task, GbSettings settings)
      : task_(task), settings_(settings) {}

  std::string name() const override { return "gb"; }
  TaskType task() const override { return task_; }
  void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           uint64_t seed) override;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd Score(const Eigen::MatrixXd& x) const override;
  nlohmann::json ToJson() const override;
  void LoadJson(const nlohmann::json& j) override;

  // Training loss before the first tree and after each round.
  const std::vector<double>& loss_history() const { return loss_history_; }
  size_t tree_count() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // go left when x <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  Eigen::VectorXd Raw(const Eigen::MatrixXd& x) const;
  static double TreeValue(const Tree& tree, const Eigen::MatrixXd& x,
                          Eigen::Index row);

  TaskType task_;
  GbSettings settings_;
  double base_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<double> loss_history_;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_GRADIENT_BOOSTING_H_
