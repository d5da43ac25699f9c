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

#include "ehrflow/synth.h"

#include <gtest/gtest.h>

#include <cmath>

#include "ehrflow/assembler.h"
#include "ehrflow/error.h"
#include "test_util.h"

namespace ehrflow {
namespace {

SchemaRegistry NoShow() {
  return LoadSchema(testing::DataDir() / "schemas" / "noshow.yaml");
}

size_t CountStatus(const CsvTable& appt, const std::string& value) {
  const int col = appt.ColumnIndex("status");
  EXPECT_GE(col, 0);
  size_t n = 0;
  for (const auto& row : appt.rows) n += row[col] == value;
  return n;
}

TEST(SynthTest, NoShowRateWithinBinomialNoise) {
  SynthOptions opts;
  opts.n_patients = 100;
  opts.rates["noshow"] = 0.2;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    opts.seed = seed;
    auto tables = GenerateSyntheticTables(NoShow(), opts);
    const auto& appt = tables.at("appointment");
    ASSERT_EQ(appt.rows.size(), 100u);
    const double sd = std::sqrt(100 * 0.2 * 0.8);
    EXPECT_NEAR(static_cast<double>(CountStatus(appt, "noshow")), 20.0, 3 * sd);
  }
}

TEST(SynthTest, SinglePatientAssembles) {
  SynthOptions opts;
  opts.n_patients = 1;
  for (const char* file : {"noshow.yaml", "reference.yaml"}) {
    auto reg = LoadSchema(testing::DataDir() / "schemas" / file);
    auto es = AssembleTables(GenerateSyntheticTables(reg, opts), reg);
    EXPECT_EQ(es.Get("patient").row_count(), 1u);
    EXPECT_EQ(es.entities.size(), reg.resources().size()) << file;
  }
  opts.n_patients = 0;
  EXPECT_THROW(GenerateSyntheticTables(NoShow(), opts), Error);
}

TEST(SynthTest, SeedRepeatIsIdentical) {
  testing::TempDir a, b;
  SynthOptions opts;
  opts.n_patients = 50;
  WriteSyntheticData(a.path(), GenerateSyntheticTables(NoShow(), opts));
  WriteSyntheticData(b.path(), GenerateSyntheticTables(NoShow(), opts));
  size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    ++files;
    EXPECT_EQ(testing::ReadFile(entry.path()),
              testing::ReadFile(b.path() / entry.path().filename()));
  }
  EXPECT_EQ(files, NoShow().resources().size());
  opts.seed = 43;
  auto other = GenerateSyntheticTables(NoShow(), opts);
  EXPECT_NE(other.at("appointment").rows, GenerateSyntheticTables(NoShow(), SynthOptions{
      50, 42, {}}).at("appointment").rows);
}

TEST(SynthTest, ConformsToSchema) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  auto tables = GenerateSyntheticTables(reg, SynthOptions{});
  AssembleOptions strict;
  strict.strict = true;
  auto es = AssembleTables(tables, reg, strict);
  for (const auto& n : es.notes) {
    EXPECT_TRUE(n.kind == NoteKind::kConsolidated) << n.subject << ": " << n.detail;
  }
  const auto& patient = tables.at("patient");
  EXPECT_EQ(patient.rows[0][patient.ColumnIndex("id")], "patient_1");
}

TEST(SynthTest, FlagRatesFollowOverrides) {
  SynthOptions opts;
  opts.n_patients = 4000;
  opts.rates["sms_received"] = 0.5;
  auto appt = GenerateSyntheticTables(NoShow(), opts).at("appointment");
  const int col = appt.ColumnIndex("sms_received");
  double yes = 0;
  for (const auto& row : appt.rows) yes += row[col] == "true" || row[col] == "1";
  EXPECT_NEAR(yes / static_cast<double>(appt.rows.size()), 0.5, 0.03);
}

}  // namespace
}  // namespace ehrflow
