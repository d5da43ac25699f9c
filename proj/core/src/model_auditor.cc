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

#include "ehrflow/model_auditor.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow {

namespace {

void CheckLengths(size_t a, size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " vs " + std::to_string(b) + " values");
  }
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "metrics need at least one row");
}

struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion Count(const std::vector<double>& t, const std::vector<double>& p) {
  Confusion c;
  for (size_t i = 0; i < t.size(); ++i) {
    const bool yt = t[i] == 1.0, yp = p[i] == 1.0;
    if (yt && yp) c.tp += 1;
    if (!yt && yp) c.fp += 1;
    if (yt && !yp) c.fn += 1;
    if (!yt && !yp) c.tn += 1;
  }
  return c;
}

double SafeDiv(double num, double den, const std::string& what,
               std::vector<std::string>* notes) {
  if (den == 0.0) {
    if (notes) notes->push_back(what + " has a zero denominator; set to 0");
    return 0.0;
  }
  return num / den;
}

double Quantile(std::vector<double> sorted, double q) {
  // Linear interpolation between order statistics.
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(sorted.size() - 1, lo + 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::optional<double> MetricReport::Get(const std::string& name) const {
  auto it = metrics.find(name);
  if (it == metrics.end()) return std::nullopt;
  return it->second;
}

nlohmann::json MetricReport::ToJson() const {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [k, v] : bootstrap) {
    b[k] = {{"low", v.low},
            {"high", v.high},
            {"n_resamples", v.n_resamples},
            {"seed", v.seed},
            {"level", v.level}};
  }
  return {{"task", std::string(TaskTypeName(task))},
          {"metrics", m},
          {"bootstrap", b},
          {"notes", notes}};
}

std::string MetricReport::Render() const {
  std::ostringstream out;
  out << "Model audit (" << TaskTypeName(task) << ")\n";
  for (const auto& [k, v] : metrics) {
    out << "  " << k << ": " << FormatDouble(v);
    auto it = bootstrap.find(k);
    if (it != bootstrap.end()) {
      out << "  [" << FormatDouble(it->second.low) << ", "
          << FormatDouble(it->second.high) << "] @" << it->second.level;
    }
    out << "\n";
  }
  for (const auto& n : notes) out << "  note: " << n << "\n";
  return out.str();
}

std::optional<double> Auc(const std::vector<double>& y_true,
                          const std::vector<double>& y_score) {
  CheckLengths(y_true.size(), y_score.size());
  const size_t n = y_true.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return y_score[a] < y_score[b]; });
  // Midranks give tied scores credit 1/2.
  std::vector<double> rank(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && y_score[order[j + 1]] == y_score[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos = 0, rank_sum = 0;
  for (size_t i = 0; i < n; ++i) {
    if (y_true[i] == 1.0) {
      pos += 1;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

MetricReport ClassificationMetrics(const std::vector<double>& y_true,
                                   const std::vector<double>& y_pred,
                                   const std::vector<double>* y_score) {
  CheckLengths(y_true.size(), y_pred.size());
  MetricReport r;
  r.task = TaskType::kBinary;
  const Confusion c = Count(y_true, y_pred);
  const double n = static_cast<double>(y_true.size());
  r.metrics["accuracy"] = (c.tp + c.tn) / n;
  // Class 1 treats 1 as positive; class 0 mirrors it.
  const double p1 = SafeDiv(c.tp, c.tp + c.fp, "precision_1", &r.notes);
  const double r1 = SafeDiv(c.tp, c.tp + c.fn, "recall_1", &r.notes);
  const double p0 = SafeDiv(c.tn, c.tn + c.fn, "precision_0", &r.notes);
  const double r0 = SafeDiv(c.tn, c.tn + c.fp, "recall_0", &r.notes);
  const double f1 = SafeDiv(2 * p1 * r1, p1 + r1, "f1_1", &r.notes);
  const double f0 = SafeDiv(2 * p0 * r0, p0 + r0, "f1_0", &r.notes);
  r.metrics["precision_1"] = p1;
  r.metrics["recall_1"] = r1;
  r.metrics["f1_1"] = f1;
  r.metrics["precision_0"] = p0;
  r.metrics["recall_0"] = r0;
  r.metrics["f1_0"] = f0;
  r.metrics["precision_macro"] = 0.5 * (p0 + p1);
  r.metrics["recall_macro"] = 0.5 * (r0 + r1);
  r.metrics["f1_macro"] = 0.5 * (f0 + f1);
  if (y_score != nullptr) {
    if (auto auc = Auc(y_true, *y_score)) {
      r.metrics["auc"] = *auc;
    } else {
      r.notes.push_back("SingleClassAUC: y_true holds one class; auc is null");
    }
  }
  return r;
}

MetricReport RegressionMetrics(const std::vector<double>& y_true,
                               const std::vector<double>& y_pred) {
  CheckLengths(y_true.size(), y_pred.size());
  MetricReport r;
  r.task = TaskType::kRegression;
  const double n = static_cast<double>(y_true.size());
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= n;
  double sse = 0, sae = 0, sst = 0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    sse += e * e;
    sae += std::abs(e);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
  }
  r.metrics["mse"] = sse / n;
  r.metrics["mae"] = sae / n;
  if (y_true.size() < 2 || sst == 0.0) {
    r.notes.push_back("r2 is null: y_true is constant or has fewer than 2 rows");
  } else {
    r.metrics["r2"] = 1.0 - sse / sst;
  }
  return r;
}

bool IsKnownMetric(const std::string& metric, TaskType task) {
  if (task == TaskType::kBinary) {
    return metric == "f1_macro" || metric == "accuracy" || metric == "auc" ||
           metric == "precision_macro" || metric == "recall_macro";
  }
  return metric == "r2" || metric == "neg_mse" || metric == "neg_mae";
}

std::string DefaultMetric(TaskType task) {
  return task == TaskType::kBinary ? "f1_macro" : "r2";
}

double ScoreMetric(const std::string& metric, const std::vector<double>& y_true,
                   const std::vector<double>& y_pred,
                   const std::vector<double>& y_score) {
  if (IsKnownMetric(metric, TaskType::kBinary)) {
    if (metric == "auc") {
      auto auc = Auc(y_true, y_score);
      if (!auc) throw Error(ErrorCode::kDegenerateFold, "auc needs both classes");
      return *auc;
    }
    return *ClassificationMetrics(y_true, y_pred).Get(metric);
  }
  if (IsKnownMetric(metric, TaskType::kRegression)) {
    MetricReport r = RegressionMetrics(y_true, y_pred);
    if (metric == "neg_mse") return -*r.Get("mse");
    if (metric == "neg_mae") return -*r.Get("mae");
    auto r2 = r.Get("r2");
    if (!r2) throw Error(ErrorCode::kDegenerateFold, "r2 needs a non-constant target");
    return *r2;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric " + metric);
}

Interval BootstrapCi(const std::string& metric, const std::vector<double>& y_true,
                     const std::vector<double>& y_pred,
                     const std::vector<double>& y_score, size_t n_resamples,
                     uint64_t seed, double level) {
  if (n_resamples < 100) {
    throw Error(ErrorCode::kInvalidArgument, "bootstrap needs >= 100 resamples");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "level must be in (0, 1)");
  }
  CheckLengths(y_true.size(), y_pred.size());
  const bool has_score = !y_score.empty();
  if (has_score) CheckLengths(y_true.size(), y_score.size());
  const size_t n = y_true.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, n - 1);
  std::vector<double> values;
  std::vector<double> t(n), p(n), s(has_score ? n : 0);
  for (size_t b = 0; b < n_resamples; ++b) {
    for (size_t i = 0; i < n; ++i) {
      const size_t k = pick(rng);
      t[i] = y_true[k];
      p[i] = y_pred[k];
      if (has_score) s[i] = y_score[k];
    }
    try {
      values.push_back(ScoreMetric(metric, t, p, has_score ? s : p));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateFold) throw;
    }
  }
  Interval out;
  out.n_resamples = n_resamples;
  out.seed = seed;
  out.level = level;
  if (values.empty()) {
    throw Error(ErrorCode::kDegenerateFold, metric + " undefined on every resample");
  }
  out.low = Quantile(values, (1.0 - level) / 2.0);
  out.high = Quantile(values, 1.0 - (1.0 - level) / 2.0);
  return out;
}

MetadataReport BuildMetadataReport(const EntitySet& es, const LabelTimes& labels,
                                   size_t feature_count) {
  MetadataReport r;
  r.loaded_variables = es.LoadedVariableCount();
  r.loaded_resources = es.entities.size();
  r.training_examples = labels.rows.size();
  r.generated_features = feature_count;
  r.problem = std::string(ProblemNameString(labels.problem.name));
  r.target_entity = labels.problem.target_entity;
  if (labels.problem.task_type == TaskType::kBinary && !labels.rows.empty()) {
    const size_t pos = labels.PositiveCount();
    r.positive_count = pos;
    const double n = static_cast<double>(labels.rows.size());
    r.positive_pct = 100.0 * static_cast<double>(pos) / n;
    r.negative_pct = 100.0 * static_cast<double>(labels.rows.size() - pos) / n;
  }
  return r;
}

nlohmann::json MetadataReport::ToJson() const {
  nlohmann::json j = {{"loaded_variables", loaded_variables},
                      {"loaded_resources", loaded_resources},
                      {"training_examples", training_examples},
                      {"generated_features", generated_features},
                      {"problem", problem},
                      {"target_entity", target_entity}};
  if (positive_count) {
    j["positive_count"] = *positive_count;
    j["positive_pct"] = *positive_pct;
    j["negative_pct"] = *negative_pct;
  }
  return j;
}

MetadataReport MetadataReport::FromJson(const nlohmann::json& j) {
  MetadataReport r;
  r.loaded_variables = j.at("loaded_variables").get<size_t>();
  r.loaded_resources = j.at("loaded_resources").get<size_t>();
  r.training_examples = j.at("training_examples").get<size_t>();
  r.generated_features = j.at("generated_features").get<size_t>();
  r.problem = j.value("problem", "");
  r.target_entity = j.value("target_entity", "");
  if (j.contains("positive_count")) {
    r.positive_count = j.at("positive_count").get<size_t>();
    r.positive_pct = j.at("positive_pct").get<double>();
    r.negative_pct = j.at("negative_pct").get<double>();
  }
  return r;
}

std::string MetadataReport::Render() const {
  std::ostringstream out;
  char buf[32];
  out << "Metadata report\n";
  out << "  No. of loaded variables: " << loaded_variables << "\n";
  out << "  No. of loaded resources: " << loaded_resources << "\n";
  out << "  Problem: " << problem << " (target " << target_entity << ")\n";
  out << "  No. training examples: " << training_examples << "\n";
  if (positive_count) {
    std::snprintf(buf, sizeof(buf), "%.2f", *positive_pct);
    out << "  Positive classes: " << *positive_count << " (" << buf << "%)\n";
    std::snprintf(buf, sizeof(buf), "%.2f", *negative_pct);
    out << "  Negative classes ratio: " << buf << "%\n";
  }
  out << "  No. generated features: " << generated_features << "\n";
  return out.str();
}

}  // namespace ehrflow
