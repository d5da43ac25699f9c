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

#ifndef EHRFLOW_SYNTH_H_
#define EHRFLOW_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ehrflow/csv.h"
#include "ehrflow/schema.h"

namespace ehrflow {

// Rates keyed by variable or event name. Recognized keys:
//   noshow                     fraction of appointments with status "noshow"
//   appointments_per_patient   appointment rows per patient
//   <boolean variable>         fraction true (e.g. scholarship, sms_received)
//   coverage                   fraction of patients with a coverage row
std::map<std::string, double> DefaultSynthRates();

struct SynthOptions {
  size_t n_patients = 100;
  uint64_t seed = 42;
  // Merged over DefaultSynthRates().
  std::map<std::string, double> rates;
};

// Schema-conformant tables, one per declared resource, keyed by resource name.
// Row ids are "<resource>_<n>". Appointment statuses follow a logistic model
// of SMS reminders, patient age, weekend visits, condition load and
// coverage, with the intercept calibrated to the requested no-show rate.
// Deterministic under the seed. Throws kInvalidArgument for n_patients == 0.
std::map<std::string, CsvTable> GenerateSyntheticTables(
    const SchemaRegistry& registry, const SynthOptions& options);

// Writes `<resource>.csv` for every table into `dir` (created if needed).
void WriteSyntheticData(const std::filesystem::path& dir,
                        const std::map<std::string, CsvTable>& tables);

}  // namespace ehrflow

#endif  // EHRFLOW_SYNTH_H_
