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

#include "ehrflow/workflow.h"

#include <gtest/gtest.h>

#include "ehrflow/error.h"
#include "ehrflow/synth.h"
#include "test_util.h"

namespace ehrflow {
namespace {

namespace fs = std::filesystem;

std::string Config(const fs::path& data, const fs::path& out) {
  return "schema: " + (testing::DataDir() / "schemas" / "noshow.yaml").string() +
         "\ndata: " + data.string() + "\noutput: " + out.string() +
         "\nproblem:\n  name: noshow\n"
         "featurizer:\n  depth: 1\n"
         "automl:\n  budget: 4\n  cv: 3\n  seed: 7\n  bootstrap: 100\n"
         "  estimators: [lr, gnb]\n";
}

TEST(WorkflowTest, EmptyDataFailsAtAssemble) {
  testing::TempDir data, out;
  auto config = RunConfig::FromYaml(Config(data.path(), out.path()));
  try {
    RunPipeline(config);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "assemble");
    EXPECT_EQ(e.code(), ErrorCode::kNoRecognizedFiles);
    EXPECT_EQ(std::string(e.what()).rfind("assemble: NoRecognizedFiles", 0), 0u);
  }
}

TEST(WorkflowTest, RunWritesArtifactsAndReruns) {
  testing::TempDir data, out1, out2;
  SynthOptions opts;
  opts.n_patients = 150;
  WriteSyntheticData(data.path(),
                     GenerateSyntheticTables(
                         LoadSchema(testing::DataDir() / "schemas" / "noshow.yaml"),
                         opts));
  RunPipeline(RunConfig::FromYaml(Config(data.path(), out1.path())));
  RunPipeline(RunConfig::FromYaml(Config(data.path(), out2.path())));
  for (const char* name :
       {artifacts::kManifest, artifacts::kAuditJson, artifacts::kLabels,
        artifacts::kFeatures, artifacts::kTrials, artifacts::kModel,
        artifacts::kMetricsJson, artifacts::kMetadata}) {
    EXPECT_TRUE(fs::exists(out1.path() / name)) << name;
  }
  for (const char* name : {artifacts::kLabels, artifacts::kFeatures,
                           artifacts::kTrials, artifacts::kModel}) {
    EXPECT_EQ(testing::ReadFile(out1.path() / name),
              testing::ReadFile(out2.path() / name))
        << name;
  }
}

TEST(WorkflowTest, StagesConsumeFiles) {
  testing::TempDir data, out;
  SynthOptions opts;
  opts.n_patients = 120;
  const auto schema = testing::DataDir() / "schemas" / "noshow.yaml";
  WriteSyntheticData(data.path(), GenerateSyntheticTables(LoadSchema(schema), opts));
  auto es = RunAssemble(schema, data.path(), out.path());
  auto labels = RunLabel(es, ProblemSpec::Defaults(ProblemName::kNoShow), out.path());
  FeaturizerSettings fs_settings;
  fs_settings.max_depth = 1;
  RunFeaturize(es, labels, fs_settings, out.path());

  auto features = ReadFeatureMatrix(out.path() / artifacts::kFeatures);
  auto labels_back = ReadLabelTimes(out.path() / artifacts::kLabels);
  EXPECT_NO_THROW(CheckAligned(features, labels_back));
  AutomlSettings automl;
  automl.budget = 2;
  automl.cv = 2;
  automl.estimators = {"lr"};
  auto trained = RunTrain(features, labels_back, automl, 1, out.path());
  EXPECT_EQ(trained.train_rows.size() + trained.test_rows.size(), labels.rows.size());

  auto model = automl::FittedPipeline::Load(out.path() / artifacts::kModel);
  auto test_features = ReadFeatureMatrix(out.path() / artifacts::kTestFeatures);
  auto test_labels = ReadLabelTimes(out.path() / artifacts::kTestLabels);
  auto report = RunReport(model, test_features, test_labels, 0, 1, out.path());
  EXPECT_TRUE(report.Get("f1_macro"));
  RunPredict(model, test_features, out.path() / artifacts::kPredictions);
  EXPECT_TRUE(fs::exists(out.path() / artifacts::kPredictions));
}

TEST(WorkflowTest, ConfigResolvesRelativePaths) {
  auto c = RunConfig::FromYaml("schema: s.yaml\ndata: d\noutput: /abs/o\n"
                               "automl:\n  budget: 9\n",
                               "/base/dir");
  EXPECT_EQ(c.schema, fs::path("/base/dir/s.yaml"));
  EXPECT_EQ(c.data, fs::path("/base/dir/d"));
  EXPECT_EQ(c.output, fs::path("/abs/o"));
  EXPECT_EQ(c.automl.budget, 9u);
  EXPECT_THROW(RunConfig::FromYaml("data: d\n"), Error);
  auto bundled = RunConfig::Load(testing::DataDir() / "configs" / "noshow.yaml");
  EXPECT_EQ(bundled.featurizer.max_depth, 2);
  EXPECT_EQ(bundled.problem.name, ProblemName::kNoShow);
}

}  // namespace
}  // namespace ehrflow
