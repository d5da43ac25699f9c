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

#include "ehrflow/automl/preprocess.h"

#include <algorithm>
#include <map>

#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

const FeatureColumn* FindByName(const FeatureTable& table, const std::string& name,
                                size_t hint) {
  if (hint < table.columns.size() && table.columns[hint].name == name) {
    return &table.columns[hint];
  }
  return table.Find(name);
}

nlohmann::json TypesJson(const std::vector<OutputType>& types) {
  nlohmann::json j = nlohmann::json::array();
  for (auto t : types) j.push_back(std::string(OutputTypeName(t)));
  return j;
}

std::vector<OutputType> TypesFromJson(const nlohmann::json& j) {
  std::vector<OutputType> out;
  for (const auto& t : j) {
    auto ty = ParseOutputType(t.get<std::string>());
    if (!ty) throw Error(ErrorCode::kParseError, "bad output type");
    out.push_back(*ty);
  }
  return out;
}

Eigen::VectorXd VectorFromJson(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

nlohmann::json VectorJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ImputerState ImputeFit(const FeatureTable& table) {
  ImputerState s;
  for (const auto& col : table.columns) {
    s.names.push_back(col.name);
    s.types.push_back(col.type);
    double fill = 0.0;
    std::string cat = kMissingCategory;
    if (col.type == OutputType::kCategorical) {
      std::map<std::string, size_t> counts;
      for (const auto& v : col.values) {
        if (const auto* str = std::get_if<std::string>(&v)) ++counts[*str];
      }
      size_t best = 0;
      for (const auto& [value, c] : counts) {
        if (c > best) {
          best = c;
          cat = value;
        }
      }
    } else {
      double sum = 0.0;
      size_t n = 0;
      for (const auto& v : col.values) {
        if (const auto* d = std::get_if<double>(&v)) {
          sum += *d;
          ++n;
        }
      }
      if (n > 0) fill = sum / static_cast<double>(n);
    }
    s.numeric_fill.push_back(fill);
    s.category_fill.push_back(cat);
  }
  return s;
}

FeatureTable ImputeApply(const ImputerState& state, const FeatureTable& table) {
  FeatureTable out;
  out.rows = table.rows;
  for (size_t j = 0; j < state.names.size(); ++j) {
    FeatureColumn col{state.names[j], state.types[j], {}};
    const FeatureColumn* src = FindByName(table, state.names[j], j);
    col.values.reserve(table.rows);
    const bool categorical = state.types[j] == OutputType::kCategorical;
    for (size_t i = 0; i < table.rows; ++i) {
      const FeatureValue* v = src ? &src->values[i] : nullptr;
      if (categorical) {
        if (v && std::holds_alternative<std::string>(*v)) {
          col.values.push_back(*v);
        } else if (v && std::holds_alternative<double>(*v)) {
          col.values.emplace_back(std::to_string(std::get<double>(*v)));
        } else {
          col.values.emplace_back(state.category_fill[j]);
        }
      } else {
        if (v && std::holds_alternative<double>(*v)) {
          col.values.push_back(*v);
        } else {
          col.values.emplace_back(state.numeric_fill[j]);
        }
      }
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

nlohmann::json ImputerState::ToJson() const {
  return {{"names", names},
          {"types", TypesJson(types)},
          {"numeric_fill", numeric_fill},
          {"category_fill", category_fill}};
}

ImputerState ImputerState::FromJson(const nlohmann::json& j) {
  ImputerState s;
  s.names = j.at("names").get<std::vector<std::string>>();
  s.types = TypesFromJson(j.at("types"));
  s.numeric_fill = j.at("numeric_fill").get<std::vector<double>>();
  s.category_fill = j.at("category_fill").get<std::vector<std::string>>();
  return s;
}

EncoderState EncodeFit(const FeatureTable& imputed, size_t max_categories) {
  EncoderState s;
  for (const auto& col : imputed.columns) {
    s.names.push_back(col.name);
    s.types.push_back(col.type);
    std::vector<std::string> cats;
    if (col.type == OutputType::kCategorical) {
      std::map<std::string, size_t> counts;
      for (const auto& v : col.values) {
        if (const auto* str = std::get_if<std::string>(&v)) ++counts[*str];
      }
      std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      if (ranked.size() > max_categories) ranked.resize(max_categories);
      for (const auto& [value, c] : ranked) {
        cats.push_back(value);
        s.output_names.push_back(col.name + "=" + value);
      }
    } else {
      s.output_names.push_back(col.name);
    }
    s.categories.push_back(std::move(cats));
  }
  return s;
}

Eigen::MatrixXd EncodeApply(const EncoderState& state, const FeatureTable& imputed) {
  const auto n = static_cast<Eigen::Index>(imputed.rows);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(state.output_names.size()));
  Eigen::Index out = 0;
  for (size_t j = 0; j < state.names.size(); ++j) {
    const FeatureColumn* col = FindByName(imputed, state.names[j], j);
    if (col == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "missing feature column " + state.names[j]);
    }
    if (state.types[j] == OutputType::kCategorical) {
      const auto& cats = state.categories[j];
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto* str = std::get_if<std::string>(&col->values[static_cast<size_t>(i)]);
        if (str == nullptr) continue;
        auto it = std::find(cats.begin(), cats.end(), *str);
        if (it != cats.end()) x(i, out + (it - cats.begin())) = 1.0;
      }
      out += static_cast<Eigen::Index>(cats.size());
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto* d = std::get_if<double>(&col->values[static_cast<size_t>(i)]);
        x(i, out) = d ? *d : 0.0;
      }
      ++out;
    }
  }
  return x;
}

nlohmann::json EncoderState::ToJson() const {
  return {{"names", names},
          {"types", TypesJson(types)},
          {"categories", categories},
          {"output_names", output_names}};
}

EncoderState EncoderState::FromJson(const nlohmann::json& j) {
  EncoderState s;
  s.names = j.at("names").get<std::vector<std::string>>();
  s.types = TypesFromJson(j.at("types"));
  s.categories = j.at("categories").get<std::vector<std::vector<std::string>>>();
  s.output_names = j.at("output_names").get<std::vector<std::string>>();
  return s;
}

MinMaxState MinMaxFit(const Eigen::MatrixXd& x) {
  MinMaxState s;
  if (x.rows() == 0) {
    s.min = Eigen::VectorXd::Zero(x.cols());
    s.max = Eigen::VectorXd::Zero(x.cols());
    return s;
  }
  s.min = x.colwise().minCoeff().transpose();
  s.max = x.colwise().maxCoeff().transpose();
  return s;
}

Eigen::MatrixXd MinMaxApply(const MinMaxState& state, const Eigen::MatrixXd& x) {
  if (x.cols() != state.min.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scaler column count mismatch");
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double range = state.max[j] - state.min[j];
    if (range <= 0.0) {
      out.col(j).setZero();
      continue;
    }
    out.col(j) = ((x.col(j).array() - state.min[j]) / range).cwiseMax(0.0).cwiseMin(1.0);
  }
  return out;
}

nlohmann::json MinMaxState::ToJson() const {
  return {{"min", VectorJson(min)}, {"max", VectorJson(max)}};
}

MinMaxState MinMaxState::FromJson(const nlohmann::json& j) {
  return {VectorFromJson(j.at("min")), VectorFromJson(j.at("max"))};
}

void Preprocessor::Fit(const FeatureTable& train) { FitTransform(train); }

Eigen::MatrixXd Preprocessor::FitTransform(const FeatureTable& train) {
  imputer_ = ImputeFit(train);
  FeatureTable imputed = ImputeApply(imputer_, train);
  encoder_ = EncodeFit(imputed);
  Eigen::MatrixXd encoded = EncodeApply(encoder_, imputed);
  scaler_ = MinMaxFit(encoded);
  return MinMaxApply(scaler_, encoded);
}

Eigen::MatrixXd Preprocessor::Transform(const FeatureTable& table) const {
  return MinMaxApply(scaler_, EncodeApply(encoder_, ImputeApply(imputer_, table)));
}

nlohmann::json Preprocessor::ToJson() const {
  return {{"impute", imputer_.ToJson()},
          {"one_hot", encoder_.ToJson()},
          {"minmax", scaler_.ToJson()}};
}

Preprocessor Preprocessor::FromJson(const nlohmann::json& j) {
  Preprocessor p;
  p.imputer_ = ImputerState::FromJson(j.at("impute"));
  p.encoder_ = EncoderState::FromJson(j.at("one_hot"));
  p.scaler_ = MinMaxState::FromJson(j.at("minmax"));
  return p;
}

}  // namespace ehrflow::automl
