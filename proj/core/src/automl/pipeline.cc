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

#include "ehrflow/automl/pipeline.h"

#include <cstdio>
#include <fstream>

#include "ehrflow/error.h"

namespace ehrflow::automl {

std::string PipelineSpec::estimator() const {
  return GetString(params, "estimator", task == TaskType::kBinary ? "lr" : "ridge");
}

std::vector<std::string> PipelineSpec::Steps() const {
  return {"impute", "one_hot", "minmax", estimator()};
}

nlohmann::json PipelineSpec::ToJson() const {
  return {{"task", std::string(TaskTypeName(task))},
          {"steps", Steps()},
          {"params", ParamsToJson(params)}};
}

PipelineSpec PipelineSpec::FromJson(const nlohmann::json& j) {
  PipelineSpec s;
  auto task = ParseTaskType(j.at("task").get<std::string>());
  if (!task) throw Error(ErrorCode::kParseError, "bad task in pipeline spec");
  s.task = *task;
  s.params = ParamsFromJson(j.at("params"));
  return s;
}

std::string HashTrainingData(const FeatureTable& table, const Eigen::VectorXd& y) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& c : table.columns) {
    mix(c.name.data(), c.name.size());
    for (const auto& v : c.values) {
      const unsigned char tag = static_cast<unsigned char>(v.index());
      mix(&tag, 1);
      if (const auto* d = std::get_if<double>(&v)) mix(d, sizeof(double));
      if (const auto* s = std::get_if<std::string>(&v)) mix(s->data(), s->size());
    }
  }
  mix(y.data(), sizeof(double) * static_cast<size_t>(y.size()));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FittedPipeline FitPipeline(const PipelineSpec& spec, const FeatureTable& train,
                           const Eigen::VectorXd& y, uint64_t seed) {
  if (static_cast<size_t>(y.size()) != train.rows) {
    throw Error(ErrorCode::kLengthMismatch, "labels and features differ in rows");
  }
  FittedPipeline fp;
  fp.spec_ = spec;
  fp.seed_ = seed;
  fp.data_hash_ = HashTrainingData(train, y);
  const Eigen::MatrixXd x = fp.preprocessor_.FitTransform(train);
  const std::string name = spec.estimator();
  fp.estimator_ = MakeEstimator(name, EstimatorParams(spec.params, name), spec.task);
  fp.estimator_->Fit(x, y, seed);
  return fp;
}

Eigen::VectorXd FittedPipeline::Predict(const FeatureTable& table) const {
  return estimator_->Predict(preprocessor_.Transform(table));
}

Eigen::VectorXd FittedPipeline::Score(const FeatureTable& table) const {
  return estimator_->Score(preprocessor_.Transform(table));
}

nlohmann::json FittedPipeline::ToJson() const {
  return {{"format", "ehrflow-pipeline"},
          {"version", 1},
          {"spec", spec_.ToJson()},
          {"seed", seed_},
          {"data_hash", data_hash_},
          {"preprocess", preprocessor_.ToJson()},
          {"estimator", estimator_->ToJson()}};
}

FittedPipeline FittedPipeline::FromJson(const nlohmann::json& j) {
  if (j.value("format", "") != "ehrflow-pipeline") {
    throw Error(ErrorCode::kParseError, "not a pipeline artifact");
  }
  FittedPipeline fp;
  fp.spec_ = PipelineSpec::FromJson(j.at("spec"));
  fp.seed_ = j.at("seed").get<uint64_t>();
  fp.data_hash_ = j.at("data_hash").get<std::string>();
  fp.preprocessor_ = Preprocessor::FromJson(j.at("preprocess"));
  fp.estimator_ = EstimatorFromJson(j.at("estimator"));
  return fp;
}

void FittedPipeline::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ToJson().dump() << "\n";
}

FittedPipeline FittedPipeline::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return FromJson(j);
}

}  // namespace ehrflow::automl
