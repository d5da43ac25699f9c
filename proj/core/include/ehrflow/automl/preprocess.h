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

#ifndef EHRFLOW_AUTOML_PREPROCESS_H_
#define EHRFLOW_AUTOML_PREPROCESS_H_

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ehrflow/feature_table.h"

namespace ehrflow::automl {

inline constexpr char kMissingCategory[] = "__missing__";

// Fill values learned from training rows: numeric mean, categorical mode
// (ties to the smallest value); all-null columns fill with 0 or
// kMissingCategory.
struct ImputerState {
  std::vector<std::string> names;
  std::vector<OutputType> types;
  std::vector<double> numeric_fill;
  std::vector<std::string> category_fill;

  nlohmann::json ToJson() const;
  static ImputerState FromJson(const nlohmann::json& j);
};

ImputerState ImputeFit(const FeatureTable& table);
// Columns are matched by name; a column missing from `table` is all fill.
FeatureTable ImputeApply(const ImputerState& state, const FeatureTable& table);

// Categorical columns become indicator columns for at most `max_categories`
// most frequent training values (ties by value); other values encode as all
// zeros.
struct EncoderState {
  std::vector<std::string> names;
  std::vector<OutputType> types;
  std::vector<std::vector<std::string>> categories;
  std::vector<std::string> output_names;

  nlohmann::json ToJson() const;
  static EncoderState FromJson(const nlohmann::json& j);
};

EncoderState EncodeFit(const FeatureTable& imputed, size_t max_categories = 20);
Eigen::MatrixXd EncodeApply(const EncoderState& state, const FeatureTable& imputed);

// x' = (x - min) / (max - min) from training columns; constant columns map to
// 0 and transformed values are clipped to [0, 1].
struct MinMaxState {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  nlohmann::json ToJson() const;
  static MinMaxState FromJson(const nlohmann::json& j);
};

MinMaxState MinMaxFit(const Eigen::MatrixXd& x);
Eigen::MatrixXd MinMaxApply(const MinMaxState& state, const Eigen::MatrixXd& x);

// impute -> encode -> min-max, fit on one table and applied to others.
class Preprocessor {
 public:
  void Fit(const FeatureTable& train);
  Eigen::MatrixXd Transform(const FeatureTable& table) const;
  Eigen::MatrixXd FitTransform(const FeatureTable& train);

  const ImputerState& imputer() const { return imputer_; }
  const EncoderState& encoder() const { return encoder_; }
  const MinMaxState& scaler() const { return scaler_; }

  nlohmann::json ToJson() const;
  static Preprocessor FromJson(const nlohmann::json& j);

 private:
  ImputerState imputer_;
  EncoderState encoder_;
  MinMaxState scaler_;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_PREPROCESS_H_
