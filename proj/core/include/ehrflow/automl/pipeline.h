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

#ifndef EHRFLOW_AUTOML_PIPELINE_H_
#define EHRFLOW_AUTOML_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ehrflow/automl/estimator.h"
#include "ehrflow/automl/params.h"
#include "ehrflow/automl/preprocess.h"
#include "ehrflow/feature_table.h"

namespace ehrflow::automl {

// impute -> one-hot -> min-max -> estimator. `params` are the joint tuner
// params; the "estimator" key selects the final step.
struct PipelineSpec {
  TaskType task = TaskType::kBinary;
  ParamMap params;

  std::string estimator() const;
  std::vector<std::string> Steps() const;
  nlohmann::json ToJson() const;
  static PipelineSpec FromJson(const nlohmann::json& j);
};

class FittedPipeline {
 public:
  FittedPipeline() = default;
  FittedPipeline(FittedPipeline&&) = default;
  FittedPipeline& operator=(FittedPipeline&&) = default;

  const PipelineSpec& spec() const { return spec_; }
  const Preprocessor& preprocessor() const { return preprocessor_; }
  const Estimator& estimator() const { return *estimator_; }
  uint64_t seed() const { return seed_; }
  const std::string& data_hash() const { return data_hash_; }

  Eigen::VectorXd Predict(const FeatureTable& table) const;
  Eigen::VectorXd Score(const FeatureTable& table) const;

  nlohmann::json ToJson() const;
  static FittedPipeline FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static FittedPipeline Load(const std::filesystem::path& path);

 private:
  friend FittedPipeline FitPipeline(const PipelineSpec&, const FeatureTable&,
                                    const Eigen::VectorXd&, uint64_t);
  PipelineSpec spec_;
  Preprocessor preprocessor_;
  std::unique_ptr<Estimator> estimator_;
  uint64_t seed_ = 0;
  std::string data_hash_;
};

// Transformer states see only `train`.
FittedPipeline FitPipeline(const PipelineSpec& spec, const FeatureTable& train,
                           const Eigen::VectorXd& y, uint64_t seed);

// Hex FNV-1a digest over names, cells and labels.
std::string HashTrainingData(const FeatureTable& table, const Eigen::VectorXd& y);

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_PIPELINE_H_
