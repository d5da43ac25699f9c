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

#ifndef EHRFLOW_TASK_H_
#define EHRFLOW_TASK_H_

#include <optional>
#include <string_view>

namespace ehrflow {

enum class TaskType { kBinary, kRegression };

inline std::string_view TaskTypeName(TaskType t) {
  return t == TaskType::kBinary ? "binary" : "regression";
}

inline std::optional<TaskType> ParseTaskType(std::string_view s) {
  if (s == "binary") return TaskType::kBinary;
  if (s == "regression") return TaskType::kRegression;
  return std::nullopt;
}

}  // namespace ehrflow

#endif  // EHRFLOW_TASK_H_
