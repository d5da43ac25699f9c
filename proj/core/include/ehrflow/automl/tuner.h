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

#ifndef EHRFLOW_AUTOML_TUNER_H_
#define EHRFLOW_AUTOML_TUNER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehrflow/automl/params.h"
#include "ehrflow/automl/pipeline.h"

namespace ehrflow::automl {

struct TrialRecord {
  size_t trial_index = 0;
  ParamMap params;
  std::vector<double> cv_scores;
  double mean_score = 0.0;  // -inf when the trial failed
  double wall_time = 0.0;   // seconds
  bool failed = false;
  std::string note;
};

struct TunerOptions {
  double gamma = 0.25;
  size_t n_candidates = 24;
  // Random trials before the surrogate; unset means max(10, budget / 10).
  std::optional<size_t> n_startup;
  // Pure random search, for comparison.
  bool random_only = false;
};

struct TuneResult {
  TrialRecord best;
  std::vector<TrialRecord> trials;
};

// Returns per-fold scores; a throw or an empty result marks the trial failed.
using Objective = std::function<std::vector<double>(const ParamMap&)>;

// Sequential model-based search with a Parzen density-ratio surrogate.
// Throws kInvalidArgument for budget 0 and kAllTrialsFailed.
TuneResult Tune(const HyperparamSpace& space, const Objective& objective,
                size_t budget, uint64_t seed, const TunerOptions& options = {});

// Uniform draw from every dimension (log dims uniform in log space).
ParamMap SampleUniform(const HyperparamSpace& space, uint64_t seed);

// Tunes pipelines over `space` with k-fold CV on `table`.
TuneResult TunePipeline(const HyperparamSpace& space, TaskType task,
                        const FeatureTable& table, const Eigen::VectorXd& y,
                        size_t budget, size_t k, const std::string& metric,
                        uint64_t seed, size_t jobs = 1,
                        const TunerOptions& options = {});

// CSV: trial, one column per dimension, fold_1..fold_k, mean. Wall time is
// left out so identical runs write identical bytes.
void WriteTrialLog(const std::filesystem::path& path,
                   const HyperparamSpace& space,
                   const std::vector<TrialRecord>& trials);

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_TUNER_H_
