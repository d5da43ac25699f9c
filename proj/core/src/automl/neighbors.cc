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

#include "ehrflow/automl/neighbors.h"

#include <algorithm>
#include <numeric>

#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j, Eigen::Index cols) {
  const auto v = j.get<std::vector<double>>();
  const Eigen::Index rows = cols == 0 ? 0 : static_cast<Eigen::Index>(v.size()) / cols;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = v[static_cast<size_t>(i * cols + c)];
  }
  return m;
}

}  // namespace

void KNeighbors::Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, uint64_t) {
  if (x.rows() == 0 || y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "knn needs matching non-empty x and y");
  }
  if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (task_ == TaskType::kBinary) CheckBinaryLabels(y);
  x_ = x;
  y_ = y;
}

void KNeighbors::Query(const Eigen::MatrixXd& x, Eigen::VectorXd* mean,
                       Eigen::VectorXd* nearest) const {
  if (x.cols() != x_.cols()) throw Error(ErrorCode::kLengthMismatch, "feature count mismatch");
  const Eigen::Index n = x_.rows();
  const Eigen::Index k = std::min<Eigen::Index>(k_, n);
  mean->resize(x.rows());
  nearest->resize(x.rows());
  const Eigen::VectorXd train_sq = x_.rowwise().squaredNorm();
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  Eigen::VectorXd dist(n);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    dist = train_sq - 2.0 * (x_ * x.row(r).transpose());
    dist.array() += x.row(r).squaredNorm();
    std::iota(order.begin(), order.end(), 0);
    auto closer = [&](Eigen::Index a, Eigen::Index b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) sum += y_[order[static_cast<size_t>(i)]];
    (*mean)[r] = sum / static_cast<double>(k);
    (*nearest)[r] = y_[order[0]];
  }
}

Eigen::VectorXd KNeighbors::Score(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd mean, nearest;
  Query(x, &mean, &nearest);
  return mean;
}

Eigen::VectorXd KNeighbors::Predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd mean, nearest;
  Query(x, &mean, &nearest);
  if (task_ == TaskType::kRegression) return mean;
  Eigen::VectorXd out(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    out[i] = mean[i] > 0.5 ? 1.0 : mean[i] < 0.5 ? 0.0 : nearest[i];
  }
  return out;
}

nlohmann::json KNeighbors::ToJson() const {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(x_.size()));
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    for (Eigen::Index c = 0; c < x_.cols(); ++c) flat.push_back(x_(i, c));
  }
  return {{"name", name()},
          {"task", std::string(TaskTypeName(task_))},
          {"k", k_},
          {"cols", x_.cols()},
          {"x", flat},
          {"y", std::vector<double>(y_.data(), y_.data() + y_.size())}};
}

void KNeighbors::LoadJson(const nlohmann::json& j) {
  k_ = j.at("k").get<int>();
  x_ = MatrixFromJson(j.at("x"), j.at("cols").get<Eigen::Index>());
  const auto y = j.at("y").get<std::vector<double>>();
  y_ = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

}  // namespace ehrflow::automl
