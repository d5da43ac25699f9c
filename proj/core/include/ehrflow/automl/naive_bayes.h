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

#ifndef EHRFLOW_AUTOML_NAIVE_BAYES_H_
#define EHRFLOW_AUTOML_NAIVE_BAYES_H_

#include "ehrflow/automl/estimator.h"

namespace ehrflow::automl {

// Gaussian naive Bayes; var_smoothing times the largest feature variance is
// added to every variance.
class GaussianNaiveBayes : public Estimator {
 public:
  explicit GaussianNaiveBayes(double var_smoothing = 1e-9)
      : var_smoothing_(var_smoothing) {}

  std::string name() const override { return "gnb"; }
  TaskType task() const override { return TaskType::kBinary; }
  void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           uint64_t seed) override;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd Score(const Eigen::MatrixXd& x) const override;
  nlohmann::json ToJson() const override;
  void LoadJson(const nlohmann::json& j) override;

 private:
  double var_smoothing_;
  Eigen::MatrixXd mean_;  // 2 x d
  Eigen::MatrixXd var_;   // 2 x d
  Eigen::Vector2d log_prior_;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_NAIVE_BAYES_H_
