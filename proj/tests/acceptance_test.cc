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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <sys/wait.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehrflow/assembler.h"
#include "ehrflow/automl/linear.h"
#include "ehrflow/automl/params.h"
#include "ehrflow/automl/tuner.h"
#include "ehrflow/data_auditor.h"
#include "ehrflow/error.h"
#include "ehrflow/featurizer.h"
#include "ehrflow/model_auditor.h"
#include "ehrflow/problem.h"
#include "ehrflow/synth.h"
#include "ehrflow/workflow.h"
#include "test_util.h"

namespace ehrflow {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::TopologicalSortSucceeds;

// Pinned tolerances and limits.
constexpr int kSubsetCount = 100;
constexpr double kSubsetSeconds = 60.0;
constexpr int kCycleGraphs = 50;
constexpr int kMaxCycleNodes = 10;
constexpr int kLeakageEntitySets = 250;
constexpr int kLeakageMinCases = 200;
constexpr int kReadmissionSets = 100;
constexpr int kMaxEncounters = 50;
constexpr size_t kToyFeatureCount = 8;
constexpr double kReportedFeatureCount = 95;  // reported noshow feature count
constexpr double kMetricTol = 1e-9;
constexpr int kAucCases = 100;
constexpr int kTunerSeeds = 20;
constexpr size_t kTunerBudget = 100;
constexpr double kTunerOptimum = 0.3;
constexpr double kTunerTol = 0.05;
constexpr double kTunerSeconds = 30.0;
constexpr int kGradInstances = 20;
constexpr double kGradTol = 1e-5;
constexpr size_t kEndToEndPatients = 2000;
constexpr double kEndToEndSeconds = 300.0;
constexpr size_t kCohortPatients = 10000;
constexpr double kCohortTolPoints = 2.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

std::string Fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

SchemaRegistry Reference() {
  return LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
}

// 1. Random resource subsets of the reference schema always assemble acyclic.
Outcome SubsetRobustness() {
  TempDir base("subsets");
  const auto reg = Reference();
  SynthOptions opts;
  opts.n_patients = 200;
  opts.seed = 2024;
  WriteSyntheticData(base.path() / "all", GenerateSyntheticTables(reg, opts));

  std::vector<std::string> names;
  for (const auto& [name, res] : reg.resources()) names.push_back(name);
  std::mt19937_64 rng(1);
  int ok = 0;
  std::string first_failure;
  const auto start = std::chrono::steady_clock::now();
  for (int s = 0; s < kSubsetCount; ++s) {
    std::vector<std::string> subset;
    while (subset.empty()) {
      for (const auto& n : names) {
        if (rng() % 2) subset.push_back(n);
      }
    }
    const fs::path dir = base.path() / ("s" + std::to_string(s));
    fs::create_directories(dir);
    for (const auto& n : subset) {
      fs::copy_file(base.path() / "all" / (n + ".csv"), dir / (n + ".csv"));
    }
    try {
      EntitySet es = Assemble(dir, reg);
      bool endpoints = true;
      for (const auto& r : es.relations) {
        endpoints &= es.Find(r.child_resource) && es.Find(r.parent_resource);
      }
      if (es.entities.size() == subset.size() && endpoints &&
          TopologicalSortSucceeds(es.relations)) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = "subset " + std::to_string(s) + " cyclic or incomplete";
      }
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  const double secs = Seconds(start);
  Outcome out;
  out.pass = ok == kSubsetCount && secs < kSubsetSeconds;
  out.detail = std::to_string(ok) + "/" + std::to_string(kSubsetCount) +
               " subsets assembled acyclic in " + Fixed(secs, 2) + " s (limit " +
               Fixed(kSubsetSeconds, 0) + " s)";
  if (!first_failure.empty()) out.detail += "; " + first_failure;
  return out;
}

// 2. Cycle resolution leaves an acyclic graph and one note per removed edge.
Outcome CycleResolution() {
  std::mt19937_64 rng(2);
  int ok = 0;
  for (int g = 0; g < kCycleGraphs; ++g) {
    std::vector<RelationshipDecl> rels;
    while (TopologicalSortSucceeds(rels) || rels.empty()) {
      rels.clear();
      const int nodes = 1 + static_cast<int>(rng() % kMaxCycleNodes);
      const int edges = 1 + static_cast<int>(rng() % (2 * nodes + 1));
      for (int e = 0; e < edges; ++e) {
        rels.push_back({"n" + std::to_string(rng() % nodes), "f" + std::to_string(e),
                        "n" + std::to_string(rng() % nodes), "id"});
      }
    }
    EntitySet in;
    in.relations = rels;
    EntitySet out = ResolveCycles(in);

    std::multiset<std::string> removed;
    std::multiset<std::string> kept;
    for (const auto& r : out.relations) kept.insert(r.ToString());
    for (const auto& r : rels) {
      auto it = kept.find(r.ToString());
      if (it != kept.end()) {
        kept.erase(it);
      } else {
        removed.insert(r.ToString());
      }
    }
    std::multiset<std::string> noted;
    bool kinds = true;
    for (const auto& n : out.notes) {
      noted.insert(n.subject);
      kinds &= n.kind == NoteKind::kConsolidated;
    }
    if (kept.empty() && TopologicalSortSucceeds(out.relations) &&
        removed == noted && kinds && !removed.empty()) {
      ++ok;
    }
  }
  return {ok == kCycleGraphs, std::to_string(ok) + "/" + std::to_string(kCycleGraphs) +
                                  " cyclic graphs resolved with notes matching the "
                                  "removed edges"};
}

// 3. Mutating events after a row's cutoff never changes that row.
SchemaRegistry LeakageSchema() {
  return SchemaRegistry::FromYaml(R"(
resources:
  ward:
    primary_key: id
    variables: {id: id, floor: numeric, wing: categorical}
  patient:
    primary_key: id
    variables: {id: id, age: numeric, sex: categorical}
  visit:
    primary_key: id
    time_index: at
    variables:
      id: id
      patient: foreign_key
      ward: foreign_key
      at: datetime
      cost: numeric
      kind: categorical
      paid: boolean
  item:
    primary_key: id
    time_index: at
    variables:
      id: id
      visit: foreign_key
      at: datetime
      qty: numeric
      code: categorical
relations:
  - visit.patient -> patient.id
  - visit.ward -> ward.id
  - item.visit -> visit.id
)");
}

struct Event {
  std::vector<std::string> cells;  // in header order
  std::optional<int64_t> minute;   // null time index when unset
};

struct World {
  std::vector<std::string> patients, wards;
  std::vector<Event> visits;  // id, patient, ward, at, cost, kind, paid
  std::vector<Event> items;   // id, visit, at, qty, code
};

Timestamp Minute(int64_t m) {
  return *ParseTimestamp("2015-06-01") + std::chrono::minutes(m);
}

std::string Pick(std::mt19937_64& rng, const std::vector<std::string>& xs) {
  return xs[rng() % xs.size()];
}

std::string Num(std::mt19937_64& rng) {
  if (rng() % 10 == 0) return "";
  return std::to_string(static_cast<int>(rng() % 50) - 10);
}

Event MakeVisit(std::mt19937_64& rng, const World& w, const std::string& id,
                std::optional<int64_t> minute) {
  static const std::vector<std::string> kinds = {"a", "b", "c", ""};
  static const std::vector<std::string> flags = {"true", "false", ""};
  return {{id, Pick(rng, w.patients), Pick(rng, w.wards),
           minute ? FormatTimestamp(Minute(*minute)) : "", Num(rng), Pick(rng, kinds),
           Pick(rng, flags)},
          minute};
}

Event MakeItem(std::mt19937_64& rng, const std::string& id, const std::string& visit,
               std::optional<int64_t> minute) {
  static const std::vector<std::string> codes = {"x", "y", "z"};
  return {{id, visit, minute ? FormatTimestamp(Minute(*minute)) : "", Num(rng),
           Pick(rng, codes)},
          minute};
}

std::map<std::string, CsvTable> ToTables(const World& w) {
  std::map<std::string, CsvTable> t;
  t["ward"].header = {"id", "floor", "wing"};
  for (size_t i = 0; i < w.wards.size(); ++i) {
    t["ward"].rows.push_back({w.wards[i], std::to_string(i), i % 2 ? "east" : "west"});
  }
  t["patient"].header = {"id", "age", "sex"};
  for (size_t i = 0; i < w.patients.size(); ++i) {
    t["patient"].rows.push_back(
        {w.patients[i], std::to_string(20 + 7 * i), i % 3 ? "F" : "M"});
  }
  t["visit"].header = {"id", "patient", "ward", "at", "cost", "kind", "paid"};
  for (const auto& v : w.visits) t["visit"].rows.push_back(v.cells);
  t["item"].header = {"id", "visit", "at", "qty", "code"};
  for (const auto& i : w.items) t["item"].rows.push_back(i.cells);
  return t;
}

bool After(const Event& e, int64_t cutoff) { return e.minute && *e.minute > cutoff; }

// Deletes, edits and adds events strictly after `cutoff`.
World MutateAfter(const World& w, int64_t cutoff, std::mt19937_64& rng, int* next_id) {
  World m;
  m.patients = w.patients;
  m.wards = w.wards;
  std::set<std::string> deleted_visits;
  for (const auto& v : w.visits) {
    if (!After(v, cutoff)) {
      m.visits.push_back(v);
      continue;
    }
    switch (rng() % 3) {
      case 0:
        deleted_visits.insert(v.cells[0]);
        break;
      case 1: {
        Event e = MakeVisit(rng, w, v.cells[0], v.minute);
        m.visits.push_back(e);
        break;
      }
      default:
        m.visits.push_back(v);
    }
  }
  std::vector<std::string> live;
  for (const auto& v : m.visits) live.push_back(v.cells[0]);
  for (const auto& i : w.items) {
    if (deleted_visits.count(i.cells[1])) continue;
    if (!After(i, cutoff)) {
      m.items.push_back(i);
      continue;
    }
    if (rng() % 3 == 0 || live.empty()) continue;
    m.items.push_back(MakeItem(rng, i.cells[0], Pick(rng, live), i.minute));
  }
  const int extra_visits = static_cast<int>(rng() % 4);
  for (int k = 0; k < extra_visits; ++k) {
    const int64_t t = cutoff + 1 + static_cast<int64_t>(rng() % 5000);
    m.visits.push_back(MakeVisit(rng, w, "nv" + std::to_string((*next_id)++), t));
    live.push_back(m.visits.back().cells[0]);
  }
  const int extra_items = live.empty() ? 0 : static_cast<int>(rng() % 4);
  for (int k = 0; k < extra_items; ++k) {
    const int64_t t = cutoff + 1 + static_cast<int64_t>(rng() % 5000);
    m.items.push_back(MakeItem(rng, "ni" + std::to_string((*next_id)++),
                               Pick(rng, live), t));
  }
  return m;
}

bool SameValue(const FeatureValue& a, const FeatureValue& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    return std::bit_cast<uint64_t>(*x) == std::bit_cast<uint64_t>(std::get<double>(b));
  }
  return a == b;
}

Outcome LeakageSafety() {
  const auto reg = LeakageSchema();
  std::mt19937_64 rng(3);
  int cases = 0, violations = 0, next_id = 0, visible_changes = 0;
  size_t feature_total = 0;
  std::string example;
  for (int s = 0; s < kLeakageEntitySets; ++s) {
    World w;
    const int np = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < np; ++i) w.patients.push_back("p" + std::to_string(i));
    w.wards = {"w0", "w1"};
    const int nv = static_cast<int>(rng() % 16);
    for (int i = 0; i < nv; ++i) {
      std::optional<int64_t> t;
      if (rng() % 12 != 0) t = static_cast<int64_t>(rng() % (30 * 1440));
      w.visits.push_back(MakeVisit(rng, w, "v" + std::to_string(i), t));
      const int ni = static_cast<int>(rng() % 4);
      for (int j = 0; j < ni; ++j) {
        std::optional<int64_t> ti;
        if (t && rng() % 10 != 0) ti = *t + static_cast<int64_t>(rng() % (5 * 1440));
        w.items.push_back(MakeItem(rng, "i" + std::to_string(i) + "_" + std::to_string(j),
                                   w.visits.back().cells[0], ti));
      }
    }
    const EntitySet es = AssembleTables(ToTables(w), reg);

    const bool visit_target = s % 2 == 1 && !w.visits.empty();
    LabelTimes labels;
    std::vector<int64_t> cutoffs;
    for (int r = 0; r < 2; ++r) {
      std::string id;
      int64_t cutoff;
      if (visit_target) {
        const Event& v = w.visits[rng() % w.visits.size()];
        id = v.cells[0];
        cutoff = (v.minute ? *v.minute : 0) + static_cast<int64_t>(rng() % 4000);
      } else {
        id = Pick(rng, w.patients);
        cutoff = static_cast<int64_t>(rng() % (36 * 1440));
      }
      labels.rows.push_back({id, Minute(cutoff), 0.0});
      cutoffs.push_back(cutoff);
    }
    FeaturizerSettings settings;
    settings.max_depth = 2;
    const auto defs = EnumerateFeatures(es, visit_target ? "visit" : "patient", settings);
    feature_total += defs.size();
    const FeatureMatrix before = ComputeFeatureMatrix(es, labels, defs);

    for (size_t r = 0; r < labels.rows.size(); ++r) {
      const World mutated = MutateAfter(w, cutoffs[r], rng, &next_id);
      const EntitySet es2 = AssembleTables(ToTables(mutated), reg);
      LabelTimes one;
      one.rows = {labels.rows[r]};
      const FeatureMatrix after = ComputeFeatureMatrix(es2, one, defs);
      ++cases;
      // The same mutation seen without a cutoff should usually show up.
      LabelTimes late = one;
      late.rows[0].cutoff_time = Minute(100 * 1440 * 365);
      const FeatureMatrix late_before = ComputeFeatureMatrix(es, late, defs);
      const FeatureMatrix late_after = ComputeFeatureMatrix(es2, late, defs);
      for (size_t j = 0; j < defs.size(); ++j) {
        if (!SameValue(late_before.table.columns[j].values[0],
                       late_after.table.columns[j].values[0])) {
          ++visible_changes;
          break;
        }
      }
      for (size_t j = 0; j < defs.size(); ++j) {
        if (!SameValue(before.table.columns[j].values[r],
                       after.table.columns[j].values[0])) {
          ++violations;
          if (example.empty()) {
            example = "set " + std::to_string(s) + " feature " + defs[j].name;
          }
          break;
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0 && cases >= kLeakageMinCases;
  out.detail = std::to_string(cases) + " mutated rows over " +
               std::to_string(kLeakageEntitySets) + " entitysets (" +
               std::to_string(feature_total) + " feature columns in total), " +
               std::to_string(violations) + " violations (" +
               std::to_string(visible_changes) +
               " of the mutations change the row when no cutoff applies)";
  if (!example.empty()) out.detail += "; first: " + example;
  return out;
}

// 4. Readmission labels equal an O(n^2) scan over encounter pairs.
Outcome ReadmissionOracle() {
  const auto reg = SchemaRegistry::FromYaml(R"(
resources:
  patient:
    primary_key: id
    variables: {id: id}
  encounter:
    primary_key: id
    time_index: start
    variables: {id: id, patient: foreign_key, start: datetime, end: datetime}
relations:
  - encounter.patient -> patient.id
)");
  const auto spec = ProblemSpec::Defaults(ProblemName::kReadmission);
  const Duration window = *spec.params.readmission_window;
  std::mt19937_64 rng(4);
  int ok = 0;
  size_t rows_checked = 0, positives = 0;
  for (int s = 0; s < kReadmissionSets; ++s) {
    struct Enc {
      std::string id, patient;
      Timestamp start;
      std::optional<Timestamp> end;
    };
    std::vector<Enc> enc;
    const int n = 1 + static_cast<int>(rng() % kMaxEncounters);
    const int np = 1 + static_cast<int>(rng() % 5);
    // Whole-day times make boundary ties at exactly 30 days common.
    for (int i = 0; i < n; ++i) {
      const Timestamp st = Minute(1440 * static_cast<int64_t>(rng() % 180));
      std::optional<Timestamp> en;
      if (rng() % 15 != 0) en = st + std::chrono::days(rng() % 10);
      enc.push_back({"e" + std::to_string(i), "p" + std::to_string(rng() % np), st, en});
    }
    CsvTable pt{{"id"}, {}};
    for (int p = 0; p < np; ++p) pt.rows.push_back({"p" + std::to_string(p)});
    CsvTable et{{"id", "patient", "start", "end"}, {}};
    for (const auto& e : enc) {
      et.rows.push_back({e.id, e.patient, FormatTimestamp(e.start),
                         e.end ? FormatTimestamp(*e.end) : ""});
    }
    const EntitySet es = AssembleTables({{"patient", pt}, {"encounter", et}}, reg);
    const LabelTimes got = GenerateLabelTimes(es, spec);

    std::vector<LabelRow> want;
    for (const auto& a : enc) {
      if (!a.end) continue;
      double label = 0.0;
      for (const auto& b : enc) {
        if (b.id != a.id && b.patient == a.patient && b.start > *a.end &&
            b.start <= *a.end + window) {
          label = 1.0;
        }
      }
      want.push_back({a.id, *a.end, label});
      positives += label == 1.0;
    }
    rows_checked += want.size();
    if (got.rows == want && got.candidate_count == enc.size() &&
        got.rows.size() + got.notes.size() == got.candidate_count) {
      ++ok;
    }
  }
  return {ok == kReadmissionSets,
          std::to_string(ok) + "/" + std::to_string(kReadmissionSets) +
              " entitysets match the pairwise scan (" + std::to_string(rows_checked) +
              " rows, " + std::to_string(positives) + " positive)"};
}

// 5. Feature counts: toy entityset by hand, no-show schema near the reported 95.
Outcome FeatureCounts() {
  const auto toy = SchemaRegistry::FromYaml(R"(
resources:
  patient:
    primary_key: id
    variables: {id: id, age: numeric}
  encounter:
    primary_key: id
    variables: {id: id, patient: foreign_key, amount: numeric}
relations:
  - encounter.patient -> patient.id
)");
  const EntitySet toy_es = AssembleTables(
      testing::Tables({{"patient", "id,age\np1,40\n"},
                       {"encounter", "id,patient,amount\ne1,p1,3\n"}}),
      toy);
  FeaturizerSettings depth1;
  depth1.max_depth = 1;
  const size_t toy_count = EnumerateFeatures(toy_es, "patient", depth1).size();

  const auto noshow = LoadSchema(testing::DataDir() / "schemas" / "noshow.yaml");
  SynthOptions opts;
  opts.n_patients = 200;
  const EntitySet es = AssembleTables(GenerateSyntheticTables(noshow, opts), noshow);
  const auto problem = ProblemSpec::Defaults(ProblemName::kNoShow);
  FeaturizerSettings settings;
  settings.max_depth = 2;
  settings.exclude = problem.LeakyVariables();
  const auto first = EnumerateFeatures(es, problem.target_entity, settings);
  const auto second = EnumerateFeatures(es, problem.target_entity, settings);
  bool same = first.size() == second.size();
  for (size_t i = 0; same && i < first.size(); ++i) same = first[i].name == second[i].name;

  const double lo = kReportedFeatureCount / 2, hi = kReportedFeatureCount * 2;
  const double n = static_cast<double>(first.size());
  return {toy_count == kToyFeatureCount && same && n >= lo && n <= hi,
          "toy " + std::to_string(toy_count) + " (hand count " +
              std::to_string(kToyFeatureCount) + "); no-show depth 2: " +
              std::to_string(first.size()) + " features, bounds [" + Fixed(lo, 1) +
              ", " + Fixed(hi, 1) + "], deterministic " + (same ? "yes" : "no")};
}

// 6. Metric values against hand evaluation; AUC rank invariance.
struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

double HandF1(const std::vector<double>& t, const std::vector<double>& p, double cls) {
  Counts c;
  for (size_t i = 0; i < t.size(); ++i) {
    c.tp += p[i] == cls && t[i] == cls;
    c.fp += p[i] == cls && t[i] != cls;
    c.fn += p[i] != cls && t[i] == cls;
  }
  const double prec = c.tp / (c.tp + c.fp);
  const double rec = c.tp / (c.tp + c.fn);
  return 2 * prec * rec / (prec + rec);
}

Outcome MetricCorrectness() {
  int checks = 0, failures = 0;
  auto expect = [&](std::optional<double> got, double want) {
    ++checks;
    if (!got || std::abs(*got - want) > kMetricTol) ++failures;
  };
  const std::vector<double> t = {1, 0, 1, 1}, p = {1, 0, 0, 1};
  const auto cls = ClassificationMetrics(t, p);
  expect(cls.Get("accuracy"), 3.0 / 4.0);
  expect(cls.Get("f1_1"), HandF1(t, p, 1));
  expect(cls.Get("f1_0"), HandF1(t, p, 0));
  expect(cls.Get("f1_macro"), (HandF1(t, p, 0) + HandF1(t, p, 1)) / 2);
  const std::vector<double> perfect = {0.9, 0.2, 0.8, 0.7};
  expect(ClassificationMetrics(t, p, &perfect).Get("auc"), 1.0);

  const auto same = RegressionMetrics({1, 2, 3}, {1, 2, 3});
  expect(same.Get("mse"), 0.0);
  expect(same.Get("mae"), 0.0);
  expect(same.Get("r2"), 1.0);
  const auto mean = RegressionMetrics({1, 2, 3}, {2, 2, 2});
  expect(mean.Get("mse"), (1.0 + 0.0 + 1.0) / 3.0);
  expect(mean.Get("mae"), (1.0 + 0.0 + 1.0) / 3.0);
  expect(mean.Get("r2"), 0.0);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int invariant = 0;
  for (int c = 0; c < kAucCases; ++c) {
    const int n = 2 + static_cast<int>(rng() % 60);
    std::vector<double> y(n), s(n);
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<double>(rng() % 2);
      s[i] = rng() % 4 == 0 ? std::round(unit(rng) * 4) / 4 : unit(rng);
    }
    y[0] = 0;
    y[1] = 1;
    const double base = *Auc(y, s);
    bool all = true;
    const std::vector<std::function<double(double)>> transforms = {
        [](double v) { return std::exp(5 * v); },
        [](double v) { return 3 * v * v * v + v - 7; },
        [](double v) { return std::log1p(v) / 2; }};
    for (const auto& f : transforms) {
      std::vector<double> w;
      for (double v : s) w.push_back(f(v));
      all &= std::abs(*Auc(y, w) - base) <= kMetricTol;
    }
    invariant += all;
  }
  return {failures == 0 && invariant == kAucCases,
          std::to_string(checks - failures) + "/" + std::to_string(checks) +
              " metric values within " + "1e-9; AUC invariant on " +
              std::to_string(invariant) + "/" + std::to_string(kAucCases) +
              " score vectors"};
}

// 7. Tuner against random search on the quadratic.
Outcome TunerEfficacy() {
  const automl::HyperparamSpace space{{{"x", automl::Domain::Continuous(0.0, 1.0)}}};
  const automl::Objective quadratic = [](const automl::ParamMap& p) {
    const double x = automl::GetDouble(p, "x", 0.0);
    return std::vector<double>{-(x - kTunerOptimum) * (x - kTunerOptimum)};
  };
  automl::TunerOptions random;
  random.random_only = true;
  std::vector<double> smbo, rand_best;
  double worst_gap = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (int seed = 0; seed < kTunerSeeds; ++seed) {
    const auto r = automl::Tune(space, quadratic, kTunerBudget, seed);
    smbo.push_back(r.best.mean_score);
    worst_gap = std::max(
        worst_gap, std::abs(automl::GetDouble(r.best.params, "x", -1) - kTunerOptimum));
  }
  const double smbo_secs = Seconds(start);
  for (int seed = 0; seed < kTunerSeeds; ++seed) {
    rand_best.push_back(automl::Tune(space, quadratic, kTunerBudget, seed, random)
                            .best.mean_score);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
  };
  const double ms = median(smbo), mr = median(rand_best);
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << "median best SMBO " << ms
     << " vs random " << mr << "; worst |x-0.3| " << std::fixed
     << std::setprecision(4) << worst_gap << "; " << std::setprecision(2) << smbo_secs
     << " s for " << kTunerSeeds << " runs";
  return {ms >= mr && worst_gap < kTunerTol && smbo_secs < kTunerSeconds, os.str()};
}

// 8. Analytic logistic gradient against central differences.
Outcome GradientCheck() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < kGradInstances; ++inst) {
    const int d = 1 + static_cast<int>(rng() % 10);
    const int n = 2 + static_cast<int>(rng() % 49);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n), w(d + 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = n01(rng);
      y(i) = static_cast<double>(rng() % 2);
    }
    for (int j = 0; j <= d; ++j) w(j) = n01(rng);
    const double c = std::exp(n01(rng));
    Eigen::VectorXd grad;
    automl::LogisticObjective(x, y, w, c, &grad);
    Eigen::VectorXd fd(d + 1);
    const double h = 1e-6;
    for (int j = 0; j <= d; ++j) {
      Eigen::VectorXd a = w, b = w;
      a(j) += h;
      b(j) -= h;
      fd(j) = (automl::LogisticObjective(x, y, a, c, nullptr) -
               automl::LogisticObjective(x, y, b, c, nullptr)) /
              (2 * h);
    }
    const double rel =
        (grad - fd).norm() / std::max({grad.norm(), fd.norm(), 1e-300});
    worst = std::max(worst, rel);
  }
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << "worst relative error " << worst
     << " over " << kGradInstances << " instances (limit " << kGradTol << ")";
  return {worst < kGradTol, os.str()};
}

// 9. Full `run` on synthetic no-show data, twice.
int RunOnce(const fs::path& config) {
#ifdef EHRFLOW_CLI_PATH
  const std::string cmd = std::string(EHRFLOW_CLI_PATH) + " run --config " +
                          config.string() + " > " + (config.string() + ".log") +
                          " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
#else
  try {
    RunPipeline(RunConfig::Load(config));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
#endif
}

std::map<std::string, uint64_t> HashDir(const fs::path& dir) {
  std::map<std::string, uint64_t> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string bytes = testing::ReadFile(entry.path());
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : bytes) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    out[entry.path().filename().string()] = h;
  }
  return out;
}

Outcome EndToEnd() {
  TempDir dir("e2e");
  const fs::path schema = testing::DataDir() / "schemas" / "noshow.yaml";
  SynthOptions opts;
  opts.n_patients = kEndToEndPatients;
  opts.seed = 42;
  opts.rates["noshow"] = 0.20;
  WriteSyntheticData(dir.path() / "data", GenerateSyntheticTables(LoadSchema(schema), opts));

  auto write_config = [&](const std::string& name) {
    const fs::path cfg = dir.path() / (name + ".yaml");
    testing::WriteFile(
        cfg, "schema: " + schema.string() + "\ndata: " + (dir.path() / "data").string() +
                 "\noutput: " + (dir.path() / name).string() +
                 "\nproblem:\n  name: noshow\nfeaturizer:\n  depth: 2\n"
                 "automl:\n  budget: 20\n  cv: 5\n  metric: f1_macro\n  seed: 42\n"
                 "  ratio: 0.8\n  estimators: [lr, knn, gnb, gb]\n  bootstrap: 1000\n");
    return cfg;
  };
  const auto start = std::chrono::steady_clock::now();
  const int status = RunOnce(write_config("run1"));
  const double secs = Seconds(start);
  const int status2 = RunOnce(write_config("run2"));
  if (status != 0 || status2 != 0) {
    return {false, "run exited with " + std::to_string(status) + "/" +
                       std::to_string(status2)};
  }

  const fs::path out = dir.path() / "run1";
  const auto labels = ReadLabelTimes(out / artifacts::kLabels);
  const auto test_labels = ReadLabelTimes(out / artifacts::kTestLabels);
  std::vector<double> y_test;
  for (const auto& r : test_labels.rows) y_test.push_back(r.label);
  // Majority class of the training rows, predicted for every test row.
  const double train_pos = static_cast<double>(labels.PositiveCount()) -
                           static_cast<double>(test_labels.PositiveCount());
  const double train_n = static_cast<double>(labels.rows.size() - y_test.size());
  const double majority = train_pos * 2 > train_n ? 1.0 : 0.0;
  const double baseline =
      *ClassificationMetrics(y_test, std::vector<double>(y_test.size(), majority))
           .Get("f1_macro");
  const auto metrics =
      nlohmann::json::parse(testing::ReadFile(out / artifacts::kMetricsJson));
  const double f1 = metrics.at("metrics").at("f1_macro").get<double>();

  const auto h1 = HashDir(out), h2 = HashDir(dir.path() / "run2");
  size_t required = 0;
  for (const char* a : {artifacts::kManifest, artifacts::kAuditJson, artifacts::kLabels,
                        artifacts::kFeatures, artifacts::kTrials, artifacts::kModel,
                        artifacts::kMetricsJson}) {
    required += h1.count(a);
  }
  const double pos_pct = 100.0 * static_cast<double>(labels.PositiveCount()) /
                         static_cast<double>(labels.rows.size());
  Outcome o;
  o.pass = f1 > baseline && secs < kEndToEndSeconds && h1 == h2 && required == 7 &&
           labels.rows.size() == kEndToEndPatients;
  o.detail = std::to_string(labels.rows.size()) + " appointments (" + Fixed(pos_pct, 2) +
             "% positive), test F1-macro " + Fixed(f1) + " vs majority baseline " +
             Fixed(baseline) + ", " + Fixed(secs, 1) + " s, " + std::to_string(h1.size()) +
             " artifacts " + (h1 == h2 ? "reproduced" : "differ") + " on rerun";
  return o;
}

// 10. Cohort percentages at the reported population rates.
Outcome CohortRates() {
  // Reported positive percentages of the reference cohort.
  const std::vector<std::pair<std::string, double>> reported = {
      {"scholarship", 9.29}, {"hypertension", 19.65}, {"diabetes", 7.09},
      {"alcoholism", 2.42}};
  const auto reg = Reference();
  SynthOptions opts;
  opts.n_patients = kCohortPatients;
  opts.seed = 10;
  for (const auto& [var, pct] : reported) opts.rates[var] = pct / 100.0;
  const EntitySet es = AssembleTables(GenerateSyntheticTables(reg, opts), reg);
  std::vector<std::string> vars;
  for (const auto& [var, pct] : reported) vars.push_back("patient." + var);
  const auto rows = CohortSummary(es, vars);
  bool ok = rows.size() == reported.size();
  std::string detail;
  for (size_t i = 0; ok && i < rows.size(); ++i) {
    const double got = rows[i].positive_pct.value_or(-100);
    ok &= std::abs(got - reported[i].second) <= kCohortTolPoints &&
          std::abs(*rows[i].negative_pct + got - 100.0) < 1e-9;
    detail += (i ? ", " : "") + reported[i].first + " " + Fixed(got, 2) + "% (ref " +
              Fixed(reported[i].second, 2) + "%)";
  }
  return {ok, detail + " at n=" + std::to_string(kCohortPatients)};
}

}  // namespace
}  // namespace ehrflow

int main() {
  using ehrflow::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 subset robustness", ehrflow::SubsetRobustness},
      {"2 cycle resolution", ehrflow::CycleResolution},
      {"3 leakage safety", ehrflow::LeakageSafety},
      {"4 readmission oracle", ehrflow::ReadmissionOracle},
      {"5 feature counts", ehrflow::FeatureCounts},
      {"6 metric correctness", ehrflow::MetricCorrectness},
      {"7 tuner efficacy", ehrflow::TunerEfficacy},
      {"8 gradient check", ehrflow::GradientCheck},
      {"9 end-to-end run", ehrflow::EndToEnd},
      {"10 cohort rates", ehrflow::CohortRates},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "] " << o.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
