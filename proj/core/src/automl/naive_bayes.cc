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

#include "ehrflow/automl/naive_bayes.h"

#include <cmath>
#include <numbers>

#include "ehrflow/error.h"

namespace ehrflow::automl {

void GaussianNaiveBayes::Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             uint64_t) {
  if (x.rows() == 0 || y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "gnb needs matching non-empty x and y");
  }
  CheckBinaryLabels(y);
  const Eigen::Index d = x.cols();
  mean_ = Eigen::MatrixXd::Zero(2, d);
  var_ = Eigen::MatrixXd::Zero(2, d);
  Eigen::Vector2d count = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y[i] == 1.0 ? 1 : 0;
    mean_.row(c) += x.row(i);
    count[c] += 1.0;
  }
  for (int c = 0; c < 2; ++c) mean_.row(c) /= count[c];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y[i] == 1.0 ? 1 : 0;
    var_.row(c).array() += (x.row(i) - mean_.row(c)).array().square();
  }
  for (int c = 0; c < 2; ++c) var_.row(c) /= count[c];
  double max_var = 0.0;
  if (d > 0) {
    const Eigen::RowVectorXd mu = x.colwise().mean();
    max_var = ((x.rowwise() - mu).array().square().colwise().sum() /
               static_cast<double>(x.rows()))
                  .maxCoeff();
  }
  double eps = var_smoothing_ * max_var;
  if (eps <= 0.0) eps = 1e-12;
  var_.array() += eps;
  log_prior_ = (count / static_cast<double>(x.rows())).array().log();
}

Eigen::VectorXd GaussianNaiveBayes::Score(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.cols()) throw Error(ErrorCode::kLengthMismatch, "feature count mismatch");
  Eigen::VectorXd out(x.rows());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double ll[2];
    for (int c = 0; c < 2; ++c) {
      ll[c] = log_prior_[c] -
              0.5 * ((x.row(i) - mean_.row(c)).array().square() / var_.row(c).array() +
                     var_.row(c).array().log() + log2pi)
                        .sum();
    }
    // Positive posterior via a stable logistic of the log-odds.
    const double z = ll[1] - ll[0];
    out[i] = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  return out;
}

Eigen::VectorXd GaussianNaiveBayes::Predict(const Eigen::MatrixXd& x) const {
  return (Score(x).array() > 0.5).cast<double>();
}

nlohmann::json GaussianNaiveBayes::ToJson() const {
  auto rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out.emplace_back(m.cols());
      for (Eigen::Index c = 0; c < m.cols(); ++c) out.back()[static_cast<size_t>(c)] = m(r, c);
    }
    return out;
  };
  return {{"name", name()},
          {"task", "binary"},
          {"var_smoothing", var_smoothing_},
          {"mean", rows(mean_)},
          {"var", rows(var_)},
          {"log_prior", {log_prior_[0], log_prior_[1]}}};
}

void GaussianNaiveBayes::LoadJson(const nlohmann::json& j) {
  var_smoothing_ = j.at("var_smoothing").get<double>();
  auto load = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<std::vector<double>>>();
    const Eigen::Index cols = v.empty() ? 0 : static_cast<Eigen::Index>(v[0].size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), cols);
    for (size_t r = 0; r < v.size(); ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = v[r][static_cast<size_t>(c)];
    }
    return m;
  };
  mean_ = load(j.at("mean"));
  var_ = load(j.at("var"));
  log_prior_ = {j.at("log_prior")[0].get<double>(), j.at("log_prior")[1].get<double>()};
}

}  // namespace ehrflow::automl
