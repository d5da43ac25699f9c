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

#include "ehrflow/automl/estimator.h"

#include <algorithm>

#include "ehrflow/automl/gradient_boosting.h"
#include "ehrflow/automl/linear.h"
#include "ehrflow/automl/naive_bayes.h"
#include "ehrflow/automl/neighbors.h"
#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

void RegisterReferenceEstimators(EstimatorRegistry& r) {
  r.Register({"lr",
              {TaskType::kBinary},
              [](const ParamMap& p, TaskType) {
                return std::make_unique<LogisticRegression>(GetDouble(p, "C", 1.0));
              },
              {{"C", Domain::Continuous(1e-3, 1e2, true)}}});
  r.Register({"knn",
              {TaskType::kBinary, TaskType::kRegression},
              [](const ParamMap& p, TaskType task) {
                return std::make_unique<KNeighbors>(task,
                                                    static_cast<int>(GetInt(p, "k", 5)));
              },
              {{"k", Domain::Integer(1, 50)}}});
  r.Register({"gnb",
              {TaskType::kBinary},
              [](const ParamMap& p, TaskType) {
                return std::make_unique<GaussianNaiveBayes>(
                    GetDouble(p, "var_smoothing", 1e-9));
              },
              {{"var_smoothing", Domain::Continuous(1e-12, 1e-3, true)}}});
  r.Register({"gb",
              {TaskType::kBinary, TaskType::kRegression},
              [](const ParamMap& p, TaskType task) {
                GbSettings s;
                s.n_estimators = static_cast<int>(GetInt(p, "n_estimators", 100));
                s.learning_rate = GetDouble(p, "learning_rate", 0.1);
                s.max_depth = static_cast<int>(GetInt(p, "max_depth", 3));
                s.min_samples_leaf = static_cast<int>(GetInt(p, "min_samples_leaf", 1));
                return std::make_unique<GradientBoosting>(task, s);
              },
              {{"n_estimators", Domain::Integer(10, 150)},
               {"learning_rate", Domain::Continuous(0.01, 0.5, true)},
               {"max_depth", Domain::Integer(1, 5)},
               {"min_samples_leaf", Domain::Integer(1, 30)}}});
  r.Register({"ridge",
              {TaskType::kRegression},
              [](const ParamMap& p, TaskType) {
                return std::make_unique<Ridge>(GetDouble(p, "alpha", 1.0));
              },
              {{"alpha", Domain::Continuous(1e-6, 1e3, true)}}});
}

}  // namespace

EstimatorRegistry& EstimatorRegistry::Global() {
  static EstimatorRegistry* registry = [] {
    auto* r = new EstimatorRegistry();
    RegisterReferenceEstimators(*r);
    return r;
  }();
  return *registry;
}

void EstimatorRegistry::Register(EstimatorEntry entry) {
  for (auto& e : entries_) {
    if (e.name == entry.name) {
      e = std::move(entry);
      return;
    }
  }
  entries_.push_back(std::move(entry));
}

const EstimatorEntry* EstimatorRegistry::Find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<std::string> EstimatorRegistry::Names(TaskType task) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (std::find(e.tasks.begin(), e.tasks.end(), task) != e.tasks.end()) {
      out.push_back(e.name);
    }
  }
  return out;
}

std::unique_ptr<Estimator> MakeEstimator(const std::string& name,
                                         const ParamMap& params, TaskType task) {
  const EstimatorEntry* e = EstimatorRegistry::Global().Find(name);
  if (e == nullptr) throw Error(ErrorCode::kInvalidArgument, "unknown estimator " + name);
  if (std::find(e->tasks.begin(), e->tasks.end(), task) == e->tasks.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "estimator " + name + " does not support " +
                    std::string(TaskTypeName(task)));
  }
  return e->factory(params, task);
}

std::unique_ptr<Estimator> EstimatorFromJson(const nlohmann::json& j) {
  auto task = ParseTaskType(j.at("task").get<std::string>());
  if (!task) throw Error(ErrorCode::kParseError, "bad task in estimator state");
  auto est = MakeEstimator(j.at("name").get<std::string>(), {}, *task);
  est->LoadJson(j);
  return est;
}

HyperparamSpace DefaultSpace(TaskType task, const std::vector<std::string>& estimators) {
  const auto& registry = EstimatorRegistry::Global();
  std::vector<std::string> names = estimators.empty() ? registry.Names(task) : estimators;
  HyperparamSpace space;
  space.dims.push_back({"estimator", Domain::Categorical(names)});
  for (const auto& name : names) {
    const EstimatorEntry* e = registry.Find(name);
    if (e == nullptr ||
        std::find(e->tasks.begin(), e->tasks.end(), task) == e->tasks.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "estimator " + name + " is not available for " +
                      std::string(TaskTypeName(task)));
    }
    for (const auto& d : e->space) space.dims.push_back({name + "." + d.name, d.domain});
  }
  return space;
}

ParamMap EstimatorParams(const ParamMap& joint, const std::string& estimator) {
  ParamMap out;
  const std::string prefix = estimator + ".";
  for (const auto& [k, v] : joint) {
    if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
  }
  return out;
}

void CheckBinaryLabels(const Eigen::VectorXd& y) {
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) {
      has0 = true;
    } else if (y[i] == 1.0) {
      has1 = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "binary labels must be 0 or 1");
    }
  }
  if (!has0 || !has1) {
    throw Error(ErrorCode::kSingularFit, "training labels hold a single class");
  }
}

}  // namespace ehrflow::automl
