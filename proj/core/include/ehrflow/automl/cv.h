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

#ifndef EHRFLOW_AUTOML_CV_H_
#define EHRFLOW_AUTOML_CV_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehrflow/automl/pipeline.h"
#include "ehrflow/feature_table.h"

namespace ehrflow::automl {

// Test-row indices of k folds (each sorted). With `stratify`, rows of each
// class are shuffled and dealt round-robin over the folds, the class order
// continuing where the previous class stopped, so fold sizes differ by at most
// one. Throws kInvalidArgument for k < 2 or k > rows.
std::vector<std::vector<size_t>> KFoldIndices(const Eigen::VectorXd& y, size_t k,
                                              uint64_t seed, bool stratify);

struct Split {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// round(ratio * n) training rows, at least one row on each side. Stratified
// splits allocate training rows per class by largest remainder. Throws
// kTooFewRows (< 2 rows) and kInvalidArgument (ratio outside (0, 1)).
Split TrainTestSplit(const Eigen::VectorXd& y, double ratio, uint64_t seed,
                     bool stratify);

struct CvResult {
  std::vector<double> scores;      // scored folds only
  std::vector<std::string> notes;  // one per skipped fold
};

// Fits the pipeline on k-1 folds and scores the held-out fold with `metric`.
// Folds that cannot be scored (kDegenerateFold) are skipped with a note; folds
// run on up to `jobs` threads with per-fold seeds derived from (seed, fold).
CvResult CrossValidate(const PipelineSpec& spec, const FeatureTable& table,
                       const Eigen::VectorXd& y, size_t k,
                       const std::string& metric, uint64_t seed,
                       size_t jobs = 1);

uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_CV_H_
