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

#ifndef EHRFLOW_AUTOML_PARAMS_H_
#define EHRFLOW_AUTOML_PARAMS_H_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace ehrflow::automl {

using ParamValue = std::variant<double, int64_t, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

// Lookups with a fallback; integers and doubles convert into each other.
double GetDouble(const ParamMap& params, const std::string& key, double fallback);
int64_t GetInt(const ParamMap& params, const std::string& key, int64_t fallback);
std::string GetString(const ParamMap& params, const std::string& key,
                      const std::string& fallback);

std::string ParamToString(const ParamValue& v);
nlohmann::json ParamsToJson(const ParamMap& params);
ParamMap ParamsFromJson(const nlohmann::json& j);

struct Domain {
  enum class Kind { kContinuous, kInteger, kCategorical };
  Kind kind = Kind::kContinuous;
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;
  std::vector<std::string> choices;

  static Domain Continuous(double lo, double hi, bool log = false);
  static Domain Integer(int64_t lo, int64_t hi, bool log = false);
  static Domain Categorical(std::vector<std::string> choices);
  // Throws kInvalidArgument for empty choices, lo >= hi or log with lo <= 0.
  void Validate() const;
};

struct Dimension {
  std::string name;
  Domain domain;
};

// Ordered list of dimensions; order fixes the random stream layout.
struct HyperparamSpace {
  std::vector<Dimension> dims;

  void Validate() const;
  nlohmann::json ToJson() const;
};

}  // namespace ehrflow::automl

#endif  // EHRFLOW_AUTOML_PARAMS_H_
