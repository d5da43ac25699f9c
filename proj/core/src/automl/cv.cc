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

#include "ehrflow/automl/cv.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <numeric>
#include <random>
#include <thread>

#include "ehrflow/error.h"
#include "ehrflow/model_auditor.h"

namespace ehrflow::automl {

uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the pair.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Row indices grouped by label value, groups in ascending label order.
std::vector<std::vector<size_t>> GroupByClass(const Eigen::VectorXd& y) {
  std::map<double, std::vector<size_t>> groups;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    groups[y[i]].push_back(static_cast<size_t>(i));
  }
  std::vector<std::vector<size_t>> out;
  for (auto& [label, rows] : groups) out.push_back(std::move(rows));
  return out;
}

}  // namespace

std::vector<std::vector<size_t>> KFoldIndices(const Eigen::VectorXd& y, size_t k,
                                              uint64_t seed, bool stratify) {
  const size_t n = static_cast<size_t>(y.size());
  if (k < 2 || k > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [2, rows]; got k=" + std::to_string(k) +
                    " for " + std::to_string(n) + " rows");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<size_t>> groups;
  if (stratify) {
    groups = GroupByClass(y);
  } else {
    groups.emplace_back(n);
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }
  std::vector<std::vector<size_t>> folds(k);
  size_t next = 0;
  for (auto& rows : groups) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (size_t r : rows) {
      folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Split TrainTestSplit(const Eigen::VectorXd& y, double ratio, uint64_t seed,
                     bool stratify) {
  const size_t n = static_cast<size_t>(y.size());
  if (n < 2) throw Error(ErrorCode::kTooFewRows, "split needs at least 2 rows");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio must be in (0, 1)");
  }
  const size_t n_train = std::clamp<size_t>(
      static_cast<size_t>(std::llround(ratio * static_cast<double>(n))), 1, n - 1);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<size_t>> groups;
  if (stratify) {
    groups = GroupByClass(y);
  } else {
    groups.emplace_back(n);
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }
  // Largest-remainder allocation of n_train over the groups.
  const double frac = static_cast<double>(n_train) / static_cast<double>(n);
  std::vector<size_t> quota(groups.size());
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    const double exact = frac * static_cast<double>(groups[g].size());
    quota[g] = static_cast<size_t>(std::floor(exact));
    assigned += quota[g];
    remainders.push_back({exact - std::floor(exact), g});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 0; assigned < n_train && i < remainders.size(); ++i) {
    ++quota[remainders[i].second];
    ++assigned;
  }
  Split split;
  for (size_t g = 0; g < groups.size(); ++g) {
    std::shuffle(groups[g].begin(), groups[g].end(), rng);
    for (size_t i = 0; i < groups[g].size(); ++i) {
      (i < quota[g] ? split.train : split.test).push_back(groups[g][i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

CvResult CrossValidate(const PipelineSpec& spec, const FeatureTable& table,
                       const Eigen::VectorXd& y, size_t k,
                       const std::string& metric, uint64_t seed, size_t jobs) {
  if (static_cast<size_t>(y.size()) != table.rows) {
    throw Error(ErrorCode::kLengthMismatch, "labels and features differ in rows");
  }
  if (!IsKnownMetric(metric, spec.task)) {
    throw Error(ErrorCode::kInvalidArgument,
                "metric " + metric + " does not apply to " +
                    std::string(TaskTypeName(spec.task)));
  }
  const auto folds = KFoldIndices(y, k, DeriveSeed(seed, 0),
                                  spec.task == TaskType::kBinary);
  std::vector<std::optional<double>> scores(k);
  std::vector<std::string> notes(k);
  std::vector<std::exception_ptr> errors(k);

  auto run_fold = [&](size_t f) {
    try {
      std::vector<char> in_test(table.rows, 0);
      for (size_t r : folds[f]) in_test[r] = 1;
      std::vector<size_t> train_rows;
      for (size_t r = 0; r < table.rows; ++r) {
        if (!in_test[r]) train_rows.push_back(r);
      }
      Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
      for (size_t i = 0; i < train_rows.size(); ++i) {
        y_train[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(train_rows[i])];
      }
      const FeatureTable test = table.Take(folds[f]);
      FittedPipeline fitted =
          FitPipeline(spec, table.Take(train_rows), y_train, DeriveSeed(seed, f + 1));
      const Eigen::VectorXd pred = fitted.Predict(test);
      const Eigen::VectorXd score = fitted.Score(test);
      std::vector<double> t, p(pred.data(), pred.data() + pred.size()),
          s(score.data(), score.data() + score.size());
      for (size_t r : folds[f]) t.push_back(y[static_cast<Eigen::Index>(r)]);
      scores[f] = ScoreMetric(metric, t, p, s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateFold) {
        notes[f] = "fold " + std::to_string(f + 1) + " skipped: " + e.what();
      } else {
        errors[f] = std::current_exception();
      }
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };

  jobs = std::max<size_t>(1, std::min(jobs, k));
  if (jobs == 1) {
    for (size_t f = 0; f < k; ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (size_t f = w; f < k; f += jobs) run_fold(f);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CvResult result;
  for (size_t f = 0; f < k; ++f) {
    if (scores[f]) result.scores.push_back(*scores[f]);
    if (!notes[f].empty()) result.notes.push_back(notes[f]);
  }
  return result;
}

}  // namespace ehrflow::automl
