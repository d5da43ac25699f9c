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

#include "ehrflow/automl/params.h"

#include <cmath>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow::automl {

double GetDouble(const ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<int64_t>(&it->second)) return static_cast<double>(*i);
  throw Error(ErrorCode::kInvalidArgument, "param " + key + " is not numeric");
}

int64_t GetInt(const ParamMap& params, const std::string& key, int64_t fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* i = std::get_if<int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) {
    return static_cast<int64_t>(std::llround(*d));
  }
  throw Error(ErrorCode::kInvalidArgument, "param " + key + " is not numeric");
}

std::string GetString(const ParamMap& params, const std::string& key,
                      const std::string& fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw Error(ErrorCode::kInvalidArgument, "param " + key + " is not a string");
}

std::string ParamToString(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return FormatDouble(*d);
  if (const auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

nlohmann::json ParamsToJson(const ParamMap& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : params) {
    std::visit([&](const auto& x) { j[k] = x; }, v);
  }
  return j;
}

ParamMap ParamsFromJson(const nlohmann::json& j) {
  ParamMap out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_number_integer()) {
      out[k] = v.get<int64_t>();
    } else if (v.is_number()) {
      out[k] = v.get<double>();
    } else if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else {
      throw Error(ErrorCode::kParseError, "param " + k + " has unsupported type");
    }
  }
  return out;
}

Domain Domain::Continuous(double lo, double hi, bool log) {
  Domain d;
  d.kind = Kind::kContinuous;
  d.lo = lo;
  d.hi = hi;
  d.log = log;
  return d;
}

Domain Domain::Integer(int64_t lo, int64_t hi, bool log) {
  Domain d;
  d.kind = Kind::kInteger;
  d.lo = static_cast<double>(lo);
  d.hi = static_cast<double>(hi);
  d.log = log;
  return d;
}

Domain Domain::Categorical(std::vector<std::string> choices) {
  Domain d;
  d.kind = Kind::kCategorical;
  d.choices = std::move(choices);
  return d;
}

void Domain::Validate() const {
  if (kind == Kind::kCategorical) {
    if (choices.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "categorical domain without choices");
    }
    return;
  }
  if (!(lo < hi)) throw Error(ErrorCode::kInvalidArgument, "domain needs lo < hi");
  if (log && lo <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "log domain needs lo > 0");
  }
}

void HyperparamSpace::Validate() const {
  if (dims.empty()) throw Error(ErrorCode::kInvalidArgument, "empty space");
  for (const auto& d : dims) d.domain.Validate();
}

nlohmann::json HyperparamSpace::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : dims) {
    nlohmann::json j = {{"name", d.name}};
    switch (d.domain.kind) {
      case Domain::Kind::kCategorical:
        j["type"] = "categorical";
        j["choices"] = d.domain.choices;
        break;
      case Domain::Kind::kInteger:
        j["type"] = "integer";
        j["range"] = {d.domain.lo, d.domain.hi};
        j["log"] = d.domain.log;
        break;
      case Domain::Kind::kContinuous:
        j["type"] = "continuous";
        j["range"] = {d.domain.lo, d.domain.hi};
        j["log"] = d.domain.log;
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace ehrflow::automl
