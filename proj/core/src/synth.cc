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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ehrflow/error.h"
#include "ehrflow/time.h"

namespace ehrflow {

namespace {

using Rng = std::mt19937_64;

uint64_t NameHash(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Rng StreamFor(uint64_t seed, std::string_view name) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(NameHash(name)),
                    static_cast<uint32_t>(NameHash(name) >> 32)};
  return Rng(seq);
}

Timestamp Day(int y, unsigned m, unsigned d) {
  return Timestamp(std::chrono::sys_days(std::chrono::year(y) / m / d).time_since_epoch());
}

Timestamp Uniform(Rng& rng, Timestamp lo, Timestamp hi) {
  std::uniform_int_distribution<int64_t> pick(lo.time_since_epoch().count(),
                                              hi.time_since_epoch().count());
  return Timestamp(Duration(pick(rng)));
}

// A time of day between 07:00 and 18:00 on `day`, truncated to minutes.
Timestamp WorkingHours(Rng& rng, Timestamp day) {
  const auto midnight = std::chrono::floor<std::chrono::days>(day);
  std::uniform_int_distribution<int> minute(7 * 60, 18 * 60);
  return Timestamp(midnight + std::chrono::minutes(minute(rng)));
}

std::optional<size_t> Col(const CsvTable& t, std::string_view name) {
  const int i = t.ColumnIndex(name);
  if (i < 0) return std::nullopt;
  return static_cast<size_t>(i);
}

std::string Id(const std::string& resource, size_t i) {
  return resource + "_" + std::to_string(i + 1);
}

double Rate(const std::map<std::string, double>& rates, const std::string& key,
            double fallback) {
  auto it = rates.find(key);
  return it == rates.end() ? fallback : it->second;
}

const std::vector<std::string>& Vocabulary(const std::string& var) {
  static const std::map<std::string, std::vector<std::string>> vocab = {
      {"class", {"ambulatory", "emergency", "inpatient"}},
      {"marital_status", {"divorced", "married", "single", "widowed"}},
      {"severity", {"mild", "moderate", "severe"}},
      {"system", {"icd9", "loinc", "snomed"}},
      {"specialty",
       {"cardiology", "dermatology", "family_medicine", "neurology", "pediatrics"}},
      {"type", {"clinic", "hospital", "laboratory"}},
      {"display",
       {"alcoholism", "asthma", "diabetes", "handicap", "hypertension", "obesity"}},
      // ICD-9 codes, including external causes from the mortality list.
      {"code", {"250.00", "401.9", "428.0", "486", "584.9", "E812.0", "E956"}},
  };
  auto it = vocab.find(var);
  if (it != vocab.end()) return it->second;
  static const std::vector<std::string> none;
  return none;
}

size_t RowCount(const std::string& resource, const ResourceSchema& schema,
                const SchemaRegistry& registry, size_t n,
                const std::map<std::string, double>& rates) {
  auto scaled = [&](double per_patient) {
    return std::max<size_t>(1, static_cast<size_t>(std::llround(per_patient * static_cast<double>(n))));
  };
  if (resource == "patient") return n;
  if (resource == "appointment") return scaled(Rate(rates, "appointments_per_patient", 1.0));
  if (resource == "encounter" || resource == "condition" || resource == "diagnosis") return scaled(2.0);
  if (resource == "observation") return scaled(3.0);
  if (resource == "procedure" || resource == "medication") return scaled(1.0);
  if (resource == "period") {
    const ResourceSchema* enc = registry.FindResource("encounter");
    return enc ? RowCount("encounter", *enc, registry, n, rates) : scaled(1.0);
  }
  if (resource == "reference_range") return scaled(1.5);
  if (resource == "coverage") return scaled(Rate(rates, "coverage", 0.0929));
  if (resource == "coding") return Vocabulary("code").size();
  if (resource == "address") return std::clamp<size_t>(n / 10, 1, 81);
  if (resource == "practitioner") return std::max<size_t>(1, n / 20);
  if (resource == "organization") return std::max<size_t>(1, n / 200);
  // Unknown resources: event-like when time-indexed, else a small lookup.
  return schema.time_index ? scaled(2.0) : 10;
}

struct Builder {
  const SchemaRegistry& registry;
  const SynthOptions& options;
  std::map<std::string, double> rates;
  std::map<std::string, size_t> counts;
  std::map<std::string, CsvTable> tables;

  void GenerateResource(const ResourceSchema& res) {
    Rng rng = StreamFor(options.seed, res.name);
    const size_t rows = counts.at(res.name);
    CsvTable& t = tables[res.name];
    for (const auto& v : res.variables) t.header.push_back(v.name);
    t.rows.assign(rows, std::vector<std::string>(res.variables.size()));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (size_t j = 0; j < res.variables.size(); ++j) {
      const VariableDecl& v = res.variables[j];
      for (size_t i = 0; i < rows; ++i) {
        std::string& cell = t.rows[i][j];
        switch (v.type) {
          case SemanticType::kId:
            cell = Id(res.name, i);
            break;
          case SemanticType::kForeignKey:
            cell = ForeignKey(res, v, i, rng);
            break;
          case SemanticType::kNumeric:
            cell = Numeric(res, v, t, i, rng);
            break;
          case SemanticType::kCategorical:
            cell = Categorical(res, v, i, rng);
            break;
          case SemanticType::kBoolean:
            cell = unit(rng) < Rate(rates, v.name, 0.5) ? "true" : "false";
            break;
          case SemanticType::kDatetime:
            cell = Datetime(res, v, t, i, rng);
            break;
          case SemanticType::kText:
            cell = "note " + std::to_string(i + 1);
            break;
        }
      }
    }
  }

  std::string ForeignKey(const ResourceSchema& res, const VariableDecl& v, size_t i,
                         Rng& rng) {
    const RelationshipDecl* rel = nullptr;
    for (const auto& r : registry.relations()) {
      if (r.child_resource == res.name && r.child_variable == v.name) rel = &r;
    }
    if (rel == nullptr) return "";
    const size_t parents = counts.at(rel->parent_resource);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (rel->parent_resource == res.name) {
      // Sparse links to earlier rows of the same resource.
      if (i == 0 || unit(rng) < 0.85) return "";
      std::uniform_int_distribution<size_t> pick(0, i - 1);
      return Id(res.name, pick(rng));
    }
    if (res.name == "coverage" && rel->parent_resource == "patient") {
      // One coverage row per covered patient.
      return Id("patient", covered_patients.at(i));
    }
    if (res.name == "period") return Id(rel->parent_resource, i % parents);
    if (rel->parent_resource == "period") return Id("period", i % parents);
    if (!v.nullable || unit(rng) < 0.9) {
      std::uniform_int_distribution<size_t> pick(0, parents - 1);
      return Id(rel->parent_resource, pick(rng));
    }
    return "";
  }

  std::string Numeric(const ResourceSchema&, const VariableDecl& v, const CsvTable& t,
                      size_t i, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (v.name == "age") {
      std::uniform_int_distribution<int> age(0, 100);
      return std::to_string(age(rng));
    }
    if (v.name == "rank") {
      std::uniform_int_distribution<int> rank(1, 3);
      return std::to_string(rank(rng));
    }
    if (v.name == "low") return std::to_string(50 + static_cast<int>(unit(rng) * 40));
    if (v.name == "high") {
      const size_t low = Col(t, "low").value_or(t.header.size());
      const double base = low < t.header.size() && !t.rows[i][low].empty()
                              ? std::stod(t.rows[i][low])
                              : 60.0;
      return std::to_string(static_cast<int>(base + 20 + unit(rng) * 40));
    }
    if (unit(rng) < 0.01) return "";  // sparse missing measurements
    if (v.name == "dose") return std::to_string(1 + static_cast<int>(unit(rng) * 100));
    std::normal_distribution<double> normal(100.0, 20.0);
    const double x = std::max(0.0, normal(rng));
    return FormatDouble(std::round(x * 10.0) / 10.0);
  }

  std::string Categorical(const ResourceSchema& res, const VariableDecl& v, size_t,
                          Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (v.name == "gender") return unit(rng) < Rate(rates, "female", 0.65) ? "F" : "M";
    if (v.name == "status") return "fulfilled";  // resolved after all tables exist
    if (v.name == "neighbourhood") {
      std::uniform_int_distribution<int> k(1, 81);
      return "neighbourhood_" + std::to_string(k(rng));
    }
    const auto& vocab = Vocabulary(v.name);
    if (!vocab.empty()) {
      std::uniform_int_distribution<size_t> k(0, vocab.size() - 1);
      return vocab[k(rng)];
    }
    std::uniform_int_distribution<int> k(0, 4);
    return res.name + "_" + v.name + "_" + std::to_string(k(rng));
  }

  std::string Datetime(const ResourceSchema& res, const VariableDecl& v, const CsvTable& t,
                       size_t i, Rng& rng) {
    auto earlier = [&](const std::string& name) -> std::optional<Timestamp> {
      auto idx = Col(t, name);
      if (!idx || t.rows[i][*idx].empty()) return std::nullopt;
      return ParseTimestamp(t.rows[i][*idx]);
    };
    if (v.name == "birth_date") return FormatTimestamp(Uniform(rng, Day(1915, 1, 1), Day(2012, 1, 1)));
    if (v.name == "start") {
      if (auto created = earlier("created")) {
        std::uniform_int_distribution<int> lead(0, 40);
        return FormatTimestamp(WorkingHours(rng, *created + std::chrono::days(lead(rng))));
      }
      return FormatTimestamp(WorkingHours(rng, Uniform(rng, Day(2012, 1, 1), Day(2014, 12, 31))));
    }
    if (v.name == "end") {
      if (auto start = earlier("start")) {
        std::exponential_distribution<double> stay(1.0 / 4.0);
        const auto hours = std::chrono::hours(1 + static_cast<int64_t>(stay(rng) * 24.0));
        return FormatTimestamp(*start + hours);
      }
    }
    if (v.name == "created") return FormatTimestamp(WorkingHours(rng, Uniform(rng, Day(2012, 1, 1), Day(2014, 12, 31))));
    (void)res;
    return FormatTimestamp(Uniform(rng, Day(2008, 1, 1), Day(2014, 12, 31)));
  }

  // Child rows that carry both patient and encounter keys follow the encounter.
  void AlignPatients() {
    auto enc_it = tables.find("encounter");
    if (enc_it == tables.end()) return;
    const auto enc_patient = Col(enc_it->second, "patient");
    if (!enc_patient) return;
    for (auto& [name, t] : tables) {
      if (name == "encounter") continue;
      auto p = Col(t, "patient");
      auto e = Col(t, "encounter");
      if (!p || !e) continue;
      for (auto& row : t.rows) {
        if (row[*e].empty()) continue;
        const size_t k = std::stoul(row[*e].substr(row[*e].rfind('_') + 1)) - 1;
        row[*p] = enc_it->second.rows[k][*enc_patient];
      }
    }
  }

  void AssignNoShow() {
    auto it = tables.find("appointment");
    if (it == tables.end()) return;
    CsvTable& appt = it->second;
    const auto status = Col(appt, "status");
    if (!status) return;
    const auto sms = Col(appt, "sms_received");
    const auto start = Col(appt, "start");
    const auto patient = Col(appt, "patient");

    auto patient_row = [](const std::string& id) -> std::optional<size_t> {
      if (id.empty()) return std::nullopt;
      return std::stoul(id.substr(id.rfind('_') + 1)) - 1;
    };
    std::vector<double> age, conditions, covered;
    if (auto pit = tables.find("patient"); pit != tables.end()) {
      const CsvTable& pt = pit->second;
      age.assign(pt.rows.size(), 50.0);
      conditions.assign(pt.rows.size(), 0.0);
      covered.assign(pt.rows.size(), 0.0);
      if (auto a = Col(pt, "age")) {
        for (size_t r = 0; r < pt.rows.size(); ++r) {
          if (!pt.rows[r][*a].empty()) age[r] = std::stod(pt.rows[r][*a]);
        }
      }
      if (auto s = Col(pt, "scholarship")) {
        for (size_t r = 0; r < pt.rows.size(); ++r) covered[r] = pt.rows[r][*s] == "true";
      }
      if (auto cit = tables.find("coverage"); cit != tables.end()) {
        if (auto c = Col(cit->second, "patient")) {
          for (const auto& row : cit->second.rows) {
            if (auto r = patient_row(row[*c])) covered[*r] = 1.0;
          }
        }
      }
      if (auto cit = tables.find("condition"); cit != tables.end()) {
        if (auto c = Col(cit->second, "patient")) {
          for (const auto& row : cit->second.rows) {
            if (auto r = patient_row(row[*c])) conditions[*r] += 1.0;
          }
        }
      }
    }

    std::vector<double> signal(appt.rows.size(), 0.0);
    for (size_t i = 0; i < appt.rows.size(); ++i) {
      const auto& row = appt.rows[i];
      double z = 0.0;
      if (sms && row[*sms] == "true") z -= 1.5;
      if (start) {
        if (auto ts = ParseTimestamp(row[*start]); ts && ToCivil(*ts).weekend) z += 1.5;
      }
      if (patient && !age.empty()) {
        if (auto r = patient_row(row[*patient])) {
          if (age[*r] < 30.0) z += 1.5;
          z += 0.6 * std::min(conditions[*r], 4.0);
          z += 1.5 * covered[*r];
        }
      }
      signal[i] = z;
    }
    const double target = std::clamp(Rate(rates, "noshow", 0.2), 0.0, 1.0);
    auto mean_rate = [&](double b) {
      double s = 0.0;
      for (double z : signal) s += 1.0 / (1.0 + std::exp(-(b + z)));
      return s / static_cast<double>(signal.size());
    };
    double lo = -30.0, hi = 30.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      const double mid = 0.5 * (lo + hi);
      (mean_rate(mid) < target ? lo : hi) = mid;
    }
    const double bias = 0.5 * (lo + hi);
    Rng rng = StreamFor(options.seed, "appointment.status");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (size_t i = 0; i < appt.rows.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(bias + signal[i])));
      appt.rows[i][*status] = unit(rng) < p ? "noshow" : "fulfilled";
    }
  }

  std::vector<size_t> covered_patients;
};

}  // namespace

std::map<std::string, double> DefaultSynthRates() {
  return {{"noshow", 0.20},      {"appointments_per_patient", 1.0},
          {"scholarship", 0.0929}, {"hypertension", 0.1965},
          {"diabetes", 0.0709},  {"alcoholism", 0.0242},
          {"sms_received", 0.321}, {"coverage", 0.0929},
          {"female", 0.65}};
}

std::map<std::string, CsvTable> GenerateSyntheticTables(const SchemaRegistry& registry,
                                                        const SynthOptions& options) {
  if (options.n_patients == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_patients must be >= 1");
  }
  Builder b{registry, options, DefaultSynthRates(), {}, {}, {}};
  for (const auto& [k, v] : options.rates) b.rates[k] = v;
  for (const auto& [name, res] : registry.resources()) {
    b.counts[name] = RowCount(name, res, registry, options.n_patients, b.rates);
  }
  if (b.counts.count("coverage")) {
    // A fixed random subset of patients is covered.
    Rng rng = StreamFor(options.seed, "coverage.patient");
    std::vector<size_t> patients(options.n_patients);
    for (size_t i = 0; i < patients.size(); ++i) patients[i] = i;
    std::shuffle(patients.begin(), patients.end(), rng);
    const size_t n = std::min(b.counts["coverage"], patients.size());
    b.counts["coverage"] = n;
    b.covered_patients.assign(patients.begin(), patients.begin() + static_cast<long>(n));
    std::sort(b.covered_patients.begin(), b.covered_patients.end());
  }
  for (const auto& [name, res] : registry.resources()) b.GenerateResource(res);
  b.AlignPatients();
  b.AssignNoShow();
  return std::move(b.tables);
}

void WriteSyntheticData(const std::filesystem::path& dir,
                        const std::map<std::string, CsvTable>& tables) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  for (const auto& [name, table] : tables) WriteCsv(dir / (name + ".csv"), table);
}

}  // namespace ehrflow
