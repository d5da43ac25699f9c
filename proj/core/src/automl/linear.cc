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

#include "ehrflow/automl/linear.h"

#include <cmath>

#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

Eigen::MatrixXd WithBias(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.leftCols(x.cols()) = x;
  a.col(x.cols()).setOnes();
  return a;
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd VectorFromJson(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double LogisticObjective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double c,
                         Eigen::VectorXd* grad) {
  const Eigen::Index d = x.cols();
  if (w.size() != d + 1 || y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "logistic objective shapes");
  }
  const double n = static_cast<double>(x.rows());
  const Eigen::VectorXd z = x * w.head(d) + Eigen::VectorXd::Constant(x.rows(), w[d]);
  double loss = 0.0;
  Eigen::VectorXd resid(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    loss += Softplus(z[i]) - y[i] * z[i];
    resid[i] = Sigmoid(z[i]) - y[i];
  }
  const double lambda = 1.0 / (c * n);
  loss = loss / n + 0.5 * lambda * w.head(d).squaredNorm();
  if (grad != nullptr) {
    grad->resize(d + 1);
    grad->head(d) = x.transpose() * resid / n + lambda * w.head(d);
    (*grad)[d] = resid.sum() / n;
  }
  return loss;
}

void LogisticRegression::Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             uint64_t) {
  CheckBinaryLabels(y);
  if (!(c_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  const Eigen::Index d = x.cols();
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd a = WithBias(x);
  const double lambda = 1.0 / (c_ * n);
  w_ = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd grad;
  double loss = LogisticObjective(x, y, w_, c_, &grad);
  for (int iter = 0; iter < max_iter_; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < 1e-10) break;
    const Eigen::VectorXd z = a * w_;
    Eigen::VectorXd s(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = Sigmoid(z[i]);
      s[i] = p * (1.0 - p) / n;
    }
    Eigen::MatrixXd h = a.transpose() * s.asDiagonal() * a;
    h.diagonal().head(d).array() += lambda;
    h.diagonal().array() += 1e-10;  // separable data leaves the bias direction flat
    const Eigen::VectorXd step = h.ldlt().solve(grad);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      Eigen::VectorXd trial = w_ - t * step;
      Eigen::VectorXd trial_grad;
      const double trial_loss = LogisticObjective(x, y, trial, c_, &trial_grad);
      if (trial_loss <= loss - 1e-4 * t * grad.dot(step)) {
        w_ = std::move(trial);
        grad = std::move(trial_grad);
        moved = loss - trial_loss > 1e-15 * std::max(1.0, loss);
        loss = trial_loss;
        break;
      }
    }
    if (!moved) break;
  }
}

Eigen::VectorXd LogisticRegression::Score(const Eigen::MatrixXd& x) const {
  const Eigen::Index d = w_.size() - 1;
  if (x.cols() != d) throw Error(ErrorCode::kLengthMismatch, "feature count mismatch");
  Eigen::VectorXd z = x * w_.head(d);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = Sigmoid(z[i] + w_[d]);
  return z;
}

Eigen::VectorXd LogisticRegression::Predict(const Eigen::MatrixXd& x) const {
  return (Score(x).array() > 0.5).cast<double>();
}

nlohmann::json LogisticRegression::ToJson() const {
  return {{"name", name()},
          {"task", "binary"},
          {"C", c_},
          {"weights", std::vector<double>(w_.data(), w_.data() + w_.size())}};
}

void LogisticRegression::LoadJson(const nlohmann::json& j) {
  c_ = j.at("C").get<double>();
  w_ = VectorFromJson(j.at("weights"));
}

void Ridge::Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, uint64_t) {
  if (x.rows() == 0 || y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "ridge needs matching non-empty x and y");
  }
  if (alpha_ < 0.0) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean_x;
  const Eigen::VectorXd yc = y.array() - mean_y;
  Eigen::MatrixXd g = xc.transpose() * xc;
  g.diagonal().array() += alpha_;
  coef_ = g.completeOrthogonalDecomposition().solve(xc.transpose() * yc);
  intercept_ = mean_y - mean_x.dot(coef_);
}

Eigen::VectorXd Ridge::Predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != coef_.size()) throw Error(ErrorCode::kLengthMismatch, "feature count mismatch");
  return (x * coef_).array() + intercept_;
}

nlohmann::json Ridge::ToJson() const {
  return {{"name", name()},
          {"task", "regression"},
          {"alpha", alpha_},
          {"coef", std::vector<double>(coef_.data(), coef_.data() + coef_.size())},
          {"intercept", intercept_}};
}

void Ridge::LoadJson(const nlohmann::json& j) {
  alpha_ = j.at("alpha").get<double>();
  coef_ = VectorFromJson(j.at("coef"));
  intercept_ = j.at("intercept").get<double>();
}

}  // namespace ehrflow::automl
