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

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ehrflow/automl/cv.h"
#include "ehrflow/csv.h"

namespace ehrflow {

namespace {

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::vector<std::string> StringList(const YAML::Node& node) {
  if (node.IsScalar()) {
    // Comma-separated shorthand.
    std::vector<std::string> out;
    std::stringstream ss(node.as<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }
  return node.as<std::vector<std::string>>();
}

template <typename F>
auto Stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const nlohmann::json::exception& e) {
    throw StageError(name, Error(ErrorCode::kParseError, e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(name, Error(ErrorCode::kIoError, e.what()));
  }
}

}  // namespace

StageError::StageError(std::string stage, const Error& cause)
    : std::runtime_error(stage + ": " + cause.what()),
      stage_(std::move(stage)),
      code_(cause.code()) {}

RunConfig RunConfig::FromYaml(std::string_view text,
                              const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw Error(ErrorCode::kParseError, "config must be a map");
  RunConfig c;
  try {
    for (const char* key : {"schema", "data", "output"}) {
      if (!root[key]) throw Error(ErrorCode::kMissingParam, std::string("config needs '") + key + "'");
    }
    c.schema = Resolve(base_dir, root["schema"].as<std::string>());
    c.data = Resolve(base_dir, root["data"].as<std::string>());
    c.output = Resolve(base_dir, root["output"].as<std::string>());
    if (root["expectations"]) {
      c.expectations = Resolve(base_dir, root["expectations"].as<std::string>());
    }
    if (root["cohort"]) c.cohort = StringList(root["cohort"]);
    if (root["jobs"]) c.jobs = std::max<size_t>(1, root["jobs"].as<size_t>());
    if (root["strict"]) c.assemble.strict = root["strict"].as<bool>();
    if (root["problem"]) {
      YAML::Emitter em;
      em << root["problem"];
      c.problem = ParseProblemSpec(em.c_str());
    }
    if (const auto f = root["featurizer"]) {
      if (f["depth"]) c.featurizer.max_depth = f["depth"].as<int>();
      if (f["agg"]) c.featurizer.agg_primitives = StringList(f["agg"]);
      if (f["trans"]) c.featurizer.transform_primitives = StringList(f["trans"]);
      if (f["exclude"]) c.featurizer.exclude = StringList(f["exclude"]);
    }
    if (const auto a = root["automl"]) {
      if (a["budget"]) c.automl.budget = a["budget"].as<size_t>();
      if (a["cv"]) c.automl.cv = a["cv"].as<size_t>();
      if (a["metric"]) c.automl.metric = a["metric"].as<std::string>();
      if (a["seed"]) c.automl.seed = a["seed"].as<uint64_t>();
      if (a["ratio"]) c.automl.ratio = a["ratio"].as<double>();
      if (a["estimators"]) c.automl.estimators = StringList(a["estimators"]);
      if (a["bootstrap"]) c.automl.bootstrap = a["bootstrap"].as<size_t>();
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  c.featurizer.jobs = c.jobs;
  return c;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromYaml(ss.str(), path.parent_path());
}

EntitySet RunAssemble(const std::filesystem::path& schema,
                      const std::filesystem::path& data,
                      const std::filesystem::path& out,
                      const AssembleOptions& options) {
  const SchemaRegistry registry = LoadSchema(schema);
  EntitySet es = Assemble(data, registry, options);
  EnsureDir(out);
  WriteText(out / artifacts::kManifest, ManifestJson(es).dump(2) + "\n");
  return es;
}

DataAuditReport RunAudit(const EntitySet& es, const ExpectationSet* expectations,
                         const std::vector<std::string>& cohort,
                         const std::filesystem::path& out) {
  DataAuditReport report;
  report.quality = AuditQuality(es);
  report.distributions = AuditDistributions(es, expectations);
  report.cohort = CohortSummary(es, cohort);
  EnsureDir(out);
  WriteText(out / artifacts::kAuditJson, report.ToJson().dump(2) + "\n");
  WriteText(out / artifacts::kAuditText, report.Render());
  return report;
}

LabelTimes RunLabel(const EntitySet& es, const ProblemSpec& problem,
                    const std::filesystem::path& out) {
  LabelTimes labels = GenerateLabelTimes(es, problem);
  EnsureDir(out);
  WriteLabelTimes(out / artifacts::kLabels, labels);
  return labels;
}

FeatureMatrix RunFeaturize(const EntitySet& es, const LabelTimes& labels,
                           FeaturizerSettings settings,
                           const std::filesystem::path& out) {
  for (const auto& v : labels.problem.LeakyVariables()) settings.exclude.push_back(v);
  const auto defs = EnumerateFeatures(es, labels.problem.target_entity, settings);
  FeatureMatrix fm = ComputeFeatureMatrix(es, labels, defs, settings.jobs);
  EnsureDir(out);
  WriteFeatureMatrix(out / artifacts::kFeatures, fm);
  WriteText(out / artifacts::kMetadata,
            BuildMetadataReport(es, labels, defs.size()).ToJson().dump(2) + "\n");
  return fm;
}

void CheckAligned(const FeatureMatrix& features, const LabelTimes& labels) {
  if (features.table.rows != labels.rows.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(features.table.rows) + " feature rows vs " +
                    std::to_string(labels.rows.size()) + " labels");
  }
  for (size_t i = 0; i < labels.rows.size(); ++i) {
    if (features.entity_ids[i] != labels.rows[i].entity_id ||
        features.cutoffs[i] != labels.rows[i].cutoff_time) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature row " + std::to_string(i) + " (" + features.entity_ids[i] +
                      ") does not match label row (" + labels.rows[i].entity_id + ")");
    }
  }
}

Eigen::VectorXd LabelVector(const LabelTimes& labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.rows.size()));
  for (size_t i = 0; i < labels.rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = labels.rows[i].label;
  }
  return y;
}

namespace {

FeatureMatrix SubsetMatrix(const FeatureMatrix& fm, const std::vector<size_t>& rows) {
  FeatureMatrix out;
  out.defs = fm.defs;
  out.table = fm.table.Take(rows);
  for (size_t r : rows) {
    out.entity_ids.push_back(fm.entity_ids[r]);
    out.cutoffs.push_back(fm.cutoffs[r]);
  }
  return out;
}

LabelTimes SubsetLabels(const LabelTimes& labels, const std::vector<size_t>& rows) {
  LabelTimes out;
  out.problem = labels.problem;
  out.candidate_count = rows.size();
  for (size_t r : rows) out.rows.push_back(labels.rows[r]);
  return out;
}

}  // namespace

TrainOutcome RunTrain(const FeatureMatrix& features, const LabelTimes& labels,
                      const AutomlSettings& settings, size_t jobs,
                      const std::filesystem::path& out) {
  CheckAligned(features, labels);
  const TaskType task = labels.problem.task_type;
  const std::string metric = settings.metric.empty() ? DefaultMetric(task) : settings.metric;
  if (!IsKnownMetric(metric, task)) {
    throw Error(ErrorCode::kInvalidArgument,
                "metric " + metric + " does not apply to " + std::string(TaskTypeName(task)));
  }
  const Eigen::VectorXd y = LabelVector(labels);
  automl::Split split =
      automl::TrainTestSplit(y, settings.ratio, settings.seed, task == TaskType::kBinary);
  const FeatureTable train = features.table.Take(split.train);
  Eigen::VectorXd y_train(static_cast<Eigen::Index>(split.train.size()));
  for (size_t i = 0; i < split.train.size(); ++i) {
    y_train[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(split.train[i])];
  }
  const auto space = automl::DefaultSpace(task, settings.estimators);
  automl::TuneResult tuning = automl::TunePipeline(space, task, train, y_train, settings.budget,
                                                   settings.cv, metric, settings.seed, jobs);
  automl::FittedPipeline model = automl::FitPipeline(
      automl::PipelineSpec{task, tuning.best.params}, train, y_train, settings.seed);

  EnsureDir(out);
  automl::WriteTrialLog(out / artifacts::kTrials, space, tuning.trials);
  model.Save(out / artifacts::kModel);
  WriteFeatureMatrix(out / artifacts::kTestFeatures, SubsetMatrix(features, split.test));
  WriteLabelTimes(out / artifacts::kTestLabels, SubsetLabels(labels, split.test));
  return {std::move(tuning), std::move(model), std::move(split.train), std::move(split.test)};
}

MetricReport RunReport(const automl::FittedPipeline& model,
                       const FeatureMatrix& test_features, const LabelTimes& test_labels,
                       size_t bootstrap, uint64_t seed, const std::filesystem::path& out) {
  CheckAligned(test_features, test_labels);
  if (test_labels.rows.empty()) throw Error(ErrorCode::kTooFewRows, "no test rows");
  const Eigen::VectorXd pred_v = model.Predict(test_features.table);
  const Eigen::VectorXd score_v = model.Score(test_features.table);
  std::vector<double> truth, pred(pred_v.data(), pred_v.data() + pred_v.size()),
      score(score_v.data(), score_v.data() + score_v.size());
  for (const auto& r : test_labels.rows) truth.push_back(r.label);
  const TaskType task = model.spec().task;
  MetricReport report = task == TaskType::kBinary
                            ? ClassificationMetrics(truth, pred, &score)
                            : RegressionMetrics(truth, pred);
  if (bootstrap > 0) {
    const std::vector<std::string> names =
        task == TaskType::kBinary ? std::vector<std::string>{"accuracy", "f1_macro", "auc"}
                                  : std::vector<std::string>{"r2"};
    for (const auto& name : names) {
      if (!report.Get(name)) continue;
      try {
        report.bootstrap[name] = BootstrapCi(name, truth, pred, score, bootstrap, seed);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateFold) throw;
        report.notes.push_back(std::string("no interval for ") + name + ": " + e.what());
      }
    }
  }
  EnsureDir(out);
  WriteText(out / artifacts::kMetricsJson, report.ToJson().dump(2) + "\n");
  WriteText(out / artifacts::kMetricsText, report.Render());
  return report;
}

void RunPredict(const automl::FittedPipeline& model, const FeatureMatrix& features,
                const std::filesystem::path& out_csv) {
  const Eigen::VectorXd pred = model.Predict(features.table);
  const Eigen::VectorXd score = model.Score(features.table);
  std::ofstream out(out_csv, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_csv.string());
  WriteCsvRow(out, {"entity_id", "cutoff_time", "prediction", "score"});
  for (size_t i = 0; i < features.table.rows; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    WriteCsvRow(out, {features.entity_ids[i], FormatTimestamp(features.cutoffs[i]),
                      FormatDouble(pred[r]), FormatDouble(score[r])});
  }
}

void RunPipeline(const RunConfig& config) {
  const auto& out = config.output;
  EntitySet es = Stage("assemble", [&] {
    return RunAssemble(config.schema, config.data, out, config.assemble);
  });
  Stage("audit", [&] {
    std::optional<ExpectationSet> expectations;
    if (config.expectations) expectations = LoadExpectations(*config.expectations);
    RunAudit(es, expectations ? &*expectations : nullptr, config.cohort, out);
    return 0;
  });
  LabelTimes labels = Stage("label", [&] { return RunLabel(es, config.problem, out); });
  FeatureMatrix features = Stage("featurize", [&] {
    FeaturizerSettings s = config.featurizer;
    s.jobs = config.jobs;
    return RunFeaturize(es, labels, s, out);
  });
  TrainOutcome trained = Stage("train", [&] {
    return RunTrain(features, labels, config.automl, config.jobs, out);
  });
  Stage("report", [&] {
    LabelTimes test_labels;
    test_labels.problem = labels.problem;
    for (size_t r : trained.test_rows) test_labels.rows.push_back(labels.rows[r]);
    FeatureMatrix test;
    test.table = features.table.Take(trained.test_rows);
    for (size_t r : trained.test_rows) {
      test.entity_ids.push_back(features.entity_ids[r]);
      test.cutoffs.push_back(features.cutoffs[r]);
    }
    RunReport(trained.model, test, test_labels, config.automl.bootstrap,
              config.automl.seed, out);
    return 0;
  });
}

}  // namespace ehrflow
