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

#include "ehrflow/automl/gradient_boosting.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Loss(TaskType task, const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    sum += task == TaskType::kBinary ? Softplus(f[i]) - y[i] * f[i]
                                     : 0.5 * (y[i] - f[i]) * (y[i] - f[i]);
  }
  return sum / static_cast<double>(y.size());
}

// Split points between distinct values, at most max_bins - 1 per feature.
std::vector<double> CutPoints(std::vector<double> v, int max_bins) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> cuts;
  const size_t m = v.size();
  if (m < 2) return cuts;
  const size_t want = static_cast<size_t>(std::max(2, max_bins)) - 1;
  if (m - 1 <= want) {
    for (size_t i = 1; i < m; ++i) cuts.push_back(0.5 * (v[i - 1] + v[i]));
    return cuts;
  }
  for (size_t q = 1; q <= want; ++q) {
    const size_t idx = std::max<size_t>(1, q * m / (want + 1));
    const double c = 0.5 * (v[idx - 1] + v[idx]);
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return cuts;
}

struct Binned {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<std::vector<double>> cuts;
  std::vector<uint8_t> bins;  // row-major

  uint8_t at(Eigen::Index r, Eigen::Index c) const {
    return bins[static_cast<size_t>(r * cols + c)];
  }
};

Binned BinFeatures(const Eigen::MatrixXd& x, int max_bins) {
  Binned b;
  b.rows = x.rows();
  b.cols = x.cols();
  b.cuts.resize(static_cast<size_t>(x.cols()));
  b.bins.resize(static_cast<size_t>(x.rows() * x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    std::vector<double> col(x.col(c).data(), x.col(c).data() + x.rows());
    auto& cuts = b.cuts[static_cast<size_t>(c)];
    cuts = CutPoints(col, max_bins);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const auto it = std::lower_bound(cuts.begin(), cuts.end(), x(r, c));
      b.bins[static_cast<size_t>(r * b.cols + c)] =
          static_cast<uint8_t>(it - cuts.begin());
    }
  }
  return b;
}

struct SplitChoice {
  double gain = 0.0;
  Eigen::Index feature = -1;
  int bin = -1;
};

}  // namespace

void GradientBoosting::Fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           uint64_t) {
  if (x.rows() == 0 || y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "gb needs matching non-empty x and y");
  }
  if (settings_.n_estimators < 0 || settings_.max_depth < 0 ||
      settings_.min_samples_leaf < 1 || !(settings_.learning_rate > 0.0) ||
      settings_.max_bins < 2 || settings_.max_bins > 255) {
    throw Error(ErrorCode::kInvalidArgument, "invalid gradient boosting settings");
  }
  if (task_ == TaskType::kBinary) {
    CheckBinaryLabels(y);
    const double p = y.mean();
    base_ = std::log(p / (1.0 - p));
  } else {
    base_ = y.mean();
  }
  trees_.clear();
  loss_history_.clear();

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Binned binned = BinFeatures(x, settings_.max_bins);
  const double lambda = settings_.l2;
  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, base_);
  double loss = Loss(task_, y, f);
  loss_history_.push_back(loss);
  Eigen::VectorXd g(n), h(n);
  std::vector<Eigen::Index> leaf_of(static_cast<size_t>(n));

  for (int round = 0; round < settings_.n_estimators; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (task_ == TaskType::kBinary) {
        const double p = Sigmoid(f[i]);
        g[i] = p - y[i];
        h[i] = std::max(p * (1.0 - p), 1e-16);
      } else {
        g[i] = f[i] - y[i];
        h[i] = 1.0;
      }
    }

    Tree tree;
    // Depth-first growth over explicit row lists.
    struct Task {
      int node;
      std::vector<Eigen::Index> rows;
      int depth;
    };
    tree.push_back(Node{});
    std::vector<Task> stack;
    {
      std::vector<Eigen::Index> all(static_cast<size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
      stack.push_back({0, std::move(all), 0});
    }
    while (!stack.empty()) {
      Task t = std::move(stack.back());
      stack.pop_back();
      double gs = 0.0, hs = 0.0;
      for (auto r : t.rows) {
        gs += g[r];
        hs += h[r];
      }
      tree[static_cast<size_t>(t.node)].value = -gs / (hs + lambda);
      for (auto r : t.rows) leaf_of[static_cast<size_t>(r)] = t.node;
      if (t.depth >= settings_.max_depth ||
          t.rows.size() < 2 * static_cast<size_t>(settings_.min_samples_leaf)) {
        continue;
      }
      SplitChoice best;
      const double parent_score = gs * gs / (hs + lambda);
      std::vector<double> hg, hh;
      std::vector<size_t> hc;
      for (Eigen::Index c = 0; c < d; ++c) {
        const size_t nb = binned.cuts[static_cast<size_t>(c)].size() + 1;
        if (nb < 2) continue;
        hg.assign(nb, 0.0);
        hh.assign(nb, 0.0);
        hc.assign(nb, 0);
        for (auto r : t.rows) {
          const uint8_t b = binned.at(r, c);
          hg[b] += g[r];
          hh[b] += h[r];
          ++hc[b];
        }
        double gl = 0.0, hl = 0.0;
        size_t cl = 0;
        for (size_t b = 0; b + 1 < nb; ++b) {
          gl += hg[b];
          hl += hh[b];
          cl += hc[b];
          const size_t cr = t.rows.size() - cl;
          if (cl < static_cast<size_t>(settings_.min_samples_leaf)) continue;
          if (cr < static_cast<size_t>(settings_.min_samples_leaf)) break;
          const double gr = gs - gl, hr = hs - hl;
          const double gain =
              gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score;
          if (gain > best.gain + 1e-12) best = {gain, c, static_cast<int>(b)};
        }
      }
      if (best.feature < 0) continue;
      std::vector<Eigen::Index> left, right;
      for (auto r : t.rows) {
        (binned.at(r, best.feature) <= best.bin ? left : right).push_back(r);
      }
      Node& node = tree[static_cast<size_t>(t.node)];
      node.feature = static_cast<int>(best.feature);
      node.threshold = binned.cuts[static_cast<size_t>(best.feature)]
                                  [static_cast<size_t>(best.bin)];
      node.left = static_cast<int>(tree.size());
      node.right = node.left + 1;
      tree.push_back(Node{});
      tree.push_back(Node{});
      const int l = node.left, r = node.right;
      stack.push_back({r, std::move(right), t.depth + 1});
      stack.push_back({l, std::move(left), t.depth + 1});
    }

    // Shrink until the training loss does not go up.
    double scale = settings_.learning_rate;
    Eigen::VectorXd trial(n);
    bool accepted = false;
    double trial_loss = loss;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      for (Eigen::Index i = 0; i < n; ++i) {
        trial[i] = f[i] + scale * tree[static_cast<size_t>(leaf_of[static_cast<size_t>(i)])].value;
      }
      trial_loss = Loss(task_, y, trial);
      if (trial_loss <= loss) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    for (auto& node : tree) node.value *= scale;
    f.swap(trial);
    loss = trial_loss;
    loss_history_.push_back(loss);
    trees_.push_back(std::move(tree));
  }
}

double GradientBoosting::TreeValue(const Tree& tree, const Eigen::MatrixXd& x,
                                   Eigen::Index row) {
  int i = 0;
  while (tree[static_cast<size_t>(i)].feature >= 0) {
    const Node& node = tree[static_cast<size_t>(i)];
    i = x(row, node.feature) <= node.threshold ? node.left : node.right;
  }
  return tree[static_cast<size_t>(i)].value;
}

Eigen::VectorXd GradientBoosting::Raw(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(x.rows(), base_);
  for (const auto& tree : trees_) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) f[r] += TreeValue(tree, x, r);
  }
  return f;
}

Eigen::VectorXd GradientBoosting::Score(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd f = Raw(x);
  if (task_ == TaskType::kBinary) {
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = Sigmoid(f[i]);
  }
  return f;
}

Eigen::VectorXd GradientBoosting::Predict(const Eigen::MatrixXd& x) const {
  if (task_ == TaskType::kRegression) return Raw(x);
  return (Raw(x).array() > 0.0).cast<double>();
}

nlohmann::json GradientBoosting::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& n : tree) {
      t.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    trees.push_back(std::move(t));
  }
  return {{"name", name()},
          {"task", std::string(TaskTypeName(task_))},
          {"n_estimators", settings_.n_estimators},
          {"learning_rate", settings_.learning_rate},
          {"max_depth", settings_.max_depth},
          {"min_samples_leaf", settings_.min_samples_leaf},
          {"base", base_},
          {"trees", trees}};
}

void GradientBoosting::LoadJson(const nlohmann::json& j) {
  settings_.n_estimators = j.at("n_estimators").get<int>();
  settings_.learning_rate = j.at("learning_rate").get<double>();
  settings_.max_depth = j.at("max_depth").get<int>();
  settings_.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  base_ = j.at("base").get<double>();
  trees_.clear();
  for (const auto& t : j.at("trees")) {
    Tree tree;
    for (const auto& n : t) {
      tree.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(),
                      n[3].get<int>(), n[4].get<double>()});
    }
    trees_.push_back(std::move(tree));
  }
}

}  // namespace ehrflow::automl
