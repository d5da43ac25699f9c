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

#ifndef EHRFLOW_TIME_H_
#define EHRFLOW_TIME_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ehrflow {

// All timestamps are UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

// Accepts "YYYY-MM-DD", "YYYY-MM-DD[T ]HH:MM[:SS[.fff]]" with an optional
// "Z" or "+HH:MM"/"-HH:MM" suffix. Naive timestamps are read as UTC.
std::optional<Timestamp> ParseTimestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SS".
std::string FormatTimestamp(Timestamp ts);

// "30d", "48h", "15m", "90s", "2w" or a bare integer number of seconds.
std::optional<Duration> ParseDuration(std::string_view text);
std::string FormatDuration(Duration d);

double ToDays(Duration d);

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
  bool weekend;
};
CivilDate ToCivil(Timestamp ts);

}  // namespace ehrflow

#endif  // EHRFLOW_TIME_H_
