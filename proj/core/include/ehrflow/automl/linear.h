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

#ifndef EHRFLOW_AUTOML_LINEAR_H_
#define EHRFLOW_AUTOML_LINEAR_H_

#include "ehrflow/automl/estimator.h"

namespace ehrflow::automl {

// Mean log loss plus 0.5 / (C n) * ||w||^2 over weights w = [coef..., bias];
// the bias is not penalized. Writes the analytic gradient when `grad` is set.
double LogisticObjective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double c,
                         Eigen::VectorXd* grad);

// L2-regularized logistic regression fit by damped Newton steps on
// LogisticObjective.
class LogisticRegression : public Estimator {
 public:
  explicit LogisticRegression(double c = 1.0, int max_iter = 100)
      : c_(c), max_iter_(max_iter) {}

  std::string name() const override { return "lr"; }
  TaskType task() const override { return TaskType::kBinary; }
  void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           uint64_t seed) override;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd Score(const Eigen::MatrixXd& x) const override;
  nlohmann::json ToJson() const override;
  void LoadJson(const nlohmann::json& j) override;

  const Eigen::VectorXd& weights() const { return w_; }

 private:
  double c_;
  int max_iter_;
  Eigen::VectorXd w_;
};

// Closed-form ridge regression with an unpenalized intercept.
class Ridge : public Estimator {
 public:
  explicit Ridge(double alpha = 1.0) : alpha_(alpha) {}

  std::string name() const override { return "ridge"; }
  TaskType task() const override { return TaskType::kRegression; }
  void Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           uint64_t seed) override;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd Score(const Eigen::MatrixXd& x) const override {
    return Predict(x);
  }
  nlohmann::json ToJson() const override;
  void LoadJson(const nlohmann::json& j) override;

  const Eigen::VectorXd& coef() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  double alpha_;
  Eigen::VectorXd coef_;
  double intercept_ = 0.0;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_LINEAR_H_
