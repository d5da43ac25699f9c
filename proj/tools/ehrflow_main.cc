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

// Command-line entry point: one subcommand per workflow stage plus `run`
// (all stages from a config file) and `synth` (synthetic data generator).

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ehrflow/synth.h"
#include "ehrflow/workflow.h"

namespace {

using ehrflow::Error;
using ehrflow::ErrorCode;

constexpr int kUsageError = 1;
constexpr int kStageFailure = 2;

std::string DefaultOutput() {
  const char* env = std::getenv("EHRFLOW_OUT");
  return env != nullptr && *env != '\0' ? env : "ehrflow_out";
}

struct ProblemFlags {
  std::string config;
  std::string name;
  std::string target;
  std::string window;
  std::string offset;
  std::string code;
  std::string label_variable;
  std::optional<int> threshold;

  void Add(CLI::App* cmd) {
    cmd->add_option("--config", config, "Config file whose problem block is used");
    cmd->add_option("--problem", name,
                    "noshow, los_classification, los_regression, readmission, "
                    "diagnosis or mortality");
    cmd->add_option("--target", target, "Target resource");
    cmd->add_option("--window", window, "Readmission window, e.g. 30d");
    cmd->add_option("--offset", offset, "Cutoff offset from the anchor, e.g. 1d");
    cmd->add_option("--threshold", threshold, "Length-of-stay threshold in days");
    cmd->add_option("--code", code, "Diagnosis code");
    cmd->add_option("--label-variable", label_variable, "Stored label column");
  }

  ehrflow::ProblemSpec Build() const {
    std::optional<ehrflow::ProblemSpec> spec;
    if (!config.empty()) spec = ehrflow::RunConfig::Load(config).problem;
    if (!name.empty()) {
      auto parsed = ehrflow::ParseProblemName(name);
      if (!parsed) throw Error(ErrorCode::kInvalidArgument, "unknown problem " + name);
      if (!spec || spec->name != *parsed) spec = ehrflow::ProblemSpec::Defaults(*parsed);
    }
    if (!spec) throw Error(ErrorCode::kMissingParam, "--problem or --config is required");
    if (!target.empty()) spec->target_entity = target;
    if (!window.empty()) {
      auto d = ehrflow::ParseDuration(window);
      if (!d) throw Error(ErrorCode::kInvalidArgument, "bad --window " + window);
      spec->params.readmission_window = *d;
    }
    if (!offset.empty()) {
      auto d = ehrflow::ParseDuration(offset);
      if (!d) throw Error(ErrorCode::kInvalidArgument, "bad --offset " + offset);
      spec->offset = *d;
    }
    if (threshold) spec->params.threshold_days = *threshold;
    if (!code.empty()) spec->params.diagnosis_code = code;
    if (!label_variable.empty()) spec->params.label_variable = label_variable;
    spec->Validate();
    return *spec;
  }
};

std::map<std::string, double> ParseRates(const std::vector<std::string>& items) {
  std::map<std::string, double> rates;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "rate must look like key=value: " + item);
    }
    try {
      rates[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad rate value in " + item);
    }
  }
  return rates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ehrflow: automated machine learning over FHIR-style health records"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ehrflow 0.1.0");

  std::string out = DefaultOutput();
  size_t jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads per stage")->check(CLI::PositiveNumber);

  std::string schema, data, labels_path, features_path, model_path, expectations;
  std::vector<std::string> cohort;
  bool strict = false;

  auto add_schema_data = [&](CLI::App* cmd) {
    cmd->add_option("--schema", schema, "Schema file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", data, "Directory of resource CSV files")->required();
    cmd->add_flag("--strict", strict, "Fail on cells that do not match their type");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output directory (default $EHRFLOW_OUT)");
  };

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic data for a schema");
  size_t n_patients = 100;
  uint64_t synth_seed = 42;
  std::vector<std::string> rate_items;
  synth->add_option("--schema", schema, "Schema file")->required()->check(CLI::ExistingFile);
  synth->add_option("--patients", n_patients, "Number of patients")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--rate", rate_items, "Rate override key=value (repeatable)");
  add_out(synth);

  auto* assemble = app.add_subcommand("assemble", "Load data into an entityset");
  add_schema_data(assemble);
  add_out(assemble);

  auto* audit = app.add_subcommand("audit", "Data quality and distribution report");
  add_schema_data(audit);
  audit->add_option("--expectations", expectations, "Expectations file")
      ->check(CLI::ExistingFile);
  audit->add_option("--cohort", cohort, "Binary variables as entity.variable")
      ->delimiter(',');
  add_out(audit);

  auto* label = app.add_subcommand("label", "Generate label times for a problem");
  add_schema_data(label);
  ProblemFlags problem;
  problem.Add(label);
  add_out(label);

  auto* featurize = app.add_subcommand("featurize", "Compute the feature matrix");
  add_schema_data(featurize);
  ehrflow::FeaturizerSettings feat;
  featurize->add_option("--labels", labels_path, "Label times CSV")->required()
      ->check(CLI::ExistingFile);
  featurize->add_option("--depth", feat.max_depth, "Maximum depth")->check(CLI::NonNegativeNumber);
  featurize->add_option("--agg", feat.agg_primitives, "Aggregation primitives")->delimiter(',');
  featurize->add_option("--trans", feat.transform_primitives, "Transform primitives")
      ->delimiter(',');
  featurize->add_option("--exclude", feat.exclude, "entity.variable to skip")->delimiter(',');
  add_out(featurize);

  auto* train = app.add_subcommand("train", "Tune and fit a pipeline");
  ehrflow::AutomlSettings automl;
  std::string task_name;
  train->add_option("--features", features_path, "Feature matrix CSV")->required()
      ->check(CLI::ExistingFile);
  train->add_option("--labels", labels_path, "Label times CSV")->required()
      ->check(CLI::ExistingFile);
  train->add_option("--task", task_name, "binary or regression (default from labels)");
  train->add_option("--budget", automl.budget, "Tuning trials")->check(CLI::PositiveNumber);
  train->add_option("--cv", automl.cv, "Cross-validation folds")->check(CLI::Range(2, 1000));
  train->add_option("--seed", automl.seed, "Random seed");
  train->add_option("--metric", automl.metric, "Metric to maximize");
  train->add_option("--ratio", automl.ratio, "Training fraction")->check(CLI::Range(0.0, 1.0));
  train->add_option("--estimators", automl.estimators, "Estimators to search")->delimiter(',');
  add_out(train);

  auto* predict = app.add_subcommand("predict", "Apply a fitted pipeline");
  predict->add_option("--model", model_path, "Model artifact")->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--features", features_path, "Feature matrix CSV")->required()
      ->check(CLI::ExistingFile);
  add_out(predict);

  auto* report = app.add_subcommand("report", "Evaluate a fitted pipeline");
  std::string test_features, test_labels;
  size_t bootstrap = 1000;
  uint64_t report_seed = 42;
  report->add_option("--model", model_path, "Model artifact")->required()
      ->check(CLI::ExistingFile);
  report->add_option("--test-features", test_features, "Held-out features")->required()
      ->check(CLI::ExistingFile);
  report->add_option("--test-labels", test_labels, "Held-out labels")->required()
      ->check(CLI::ExistingFile);
  report->add_option("--bootstrap", bootstrap, "Bootstrap resamples (0 disables)");
  report->add_option("--seed", report_seed, "Bootstrap seed");
  add_out(report);

  auto* run = app.add_subcommand("run", "Run every stage from a config file");
  std::string config_path;
  std::optional<size_t> run_budget, run_cv;
  std::optional<uint64_t> run_seed;
  std::optional<int> run_depth;
  std::string run_schema, run_data, run_out;
  run->add_option("--config", config_path, "Run config")->required()->check(CLI::ExistingFile);
  run->add_option("--schema", run_schema, "Override schema");
  run->add_option("--data", run_data, "Override data directory");
  run->add_option("--out", run_out, "Override output directory");
  run->add_option("--budget", run_budget, "Override tuning trials");
  run->add_option("--cv", run_cv, "Override folds");
  run->add_option("--seed", run_seed, "Override seed");
  run->add_option("--depth", run_depth, "Override featurizer depth");
  run->add_flag("--strict", strict, "Fail on cells that do not match their type");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    ehrflow::AssembleOptions assemble_options;
    assemble_options.strict = strict;
    auto load_es = [&] {
      return ehrflow::RunAssemble(schema, data, out, assemble_options);
    };

    if (*synth) {
      ehrflow::SynthOptions opts;
      opts.n_patients = n_patients;
      opts.seed = synth_seed;
      opts.rates = ParseRates(rate_items);
      const auto registry = ehrflow::LoadSchema(schema);
      ehrflow::WriteSyntheticData(out, ehrflow::GenerateSyntheticTables(registry, opts));
      std::cout << "wrote synthetic data to " << out << "\n";
    } else if (*assemble) {
      const auto es = load_es();
      std::cout << es.entities.size() << " entities, " << es.relations.size()
                << " relations, " << es.notes.size() << " notes\n";
    } else if (*audit) {
      const auto es = load_es();
      std::optional<ehrflow::ExpectationSet> exp;
      if (!expectations.empty()) exp = ehrflow::LoadExpectations(expectations);
      std::cout << ehrflow::RunAudit(es, exp ? &*exp : nullptr, cohort, out).Render();
    } else if (*label) {
      const auto spec = problem.Build();
      const auto es = load_es();
      const auto lt = ehrflow::RunLabel(es, spec, out);
      std::cout << lt.rows.size() << " label rows from " << lt.candidate_count
                << " candidates\n";
    } else if (*featurize) {
      const auto es = load_es();
      const auto lt = ehrflow::ReadLabelTimes(labels_path);
      feat.jobs = jobs;
      const auto fm = ehrflow::RunFeaturize(es, lt, feat, out);
      std::cout << fm.defs.size() << " features x " << fm.table.rows << " rows\n";
    } else if (*train) {
      auto lt = ehrflow::ReadLabelTimes(labels_path);
      if (!task_name.empty()) {
        auto task = ehrflow::ParseTaskType(task_name);
        if (!task) throw Error(ErrorCode::kInvalidArgument, "unknown task " + task_name);
        lt.problem.task_type = *task;
      }
      const auto fm = ehrflow::ReadFeatureMatrix(features_path);
      const auto outcome = ehrflow::RunTrain(fm, lt, automl, jobs, out);
      std::cout << "best trial " << outcome.tuning.best.trial_index << " ("
                << outcome.model.spec().estimator() << ") mean cv score "
                << outcome.tuning.best.mean_score << "\n";
    } else if (*predict) {
      const auto model = ehrflow::automl::FittedPipeline::Load(model_path);
      const auto fm = ehrflow::ReadFeatureMatrix(features_path);
      std::filesystem::create_directories(out);
      ehrflow::RunPredict(model, fm, std::filesystem::path(out) / ehrflow::artifacts::kPredictions);
    } else if (*report) {
      const auto model = ehrflow::automl::FittedPipeline::Load(model_path);
      const auto fm = ehrflow::ReadFeatureMatrix(test_features);
      const auto lt = ehrflow::ReadLabelTimes(test_labels);
      std::cout << ehrflow::RunReport(model, fm, lt, bootstrap, report_seed, out).Render();
    } else if (*run) {
      auto config = ehrflow::RunConfig::Load(config_path);
      if (!run_schema.empty()) config.schema = run_schema;
      if (!run_data.empty()) config.data = run_data;
      if (!run_out.empty()) config.output = run_out;
      if (run_budget) config.automl.budget = *run_budget;
      if (run_cv) config.automl.cv = *run_cv;
      if (run_seed) config.automl.seed = *run_seed;
      if (run_depth) config.featurizer.max_depth = *run_depth;
      if (strict) config.assemble.strict = true;
      if (app.get_option("--jobs")->count() > 0) config.jobs = jobs;
      ehrflow::RunPipeline(config);
      std::cout << "artifacts written to " << config.output.string() << "\n";
    }
  } catch (const ehrflow::StageError& e) {
    std::cerr << "error: stage " << e.what() << "\n";
    return kStageFailure;
  } catch (const Error& e) {
    std::cerr << "error: stage " << stage << ": " << e.what() << "\n";
    return kStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: stage " << stage << ": " << e.what() << "\n";
    return kStageFailure;
  }
  return 0;
}
