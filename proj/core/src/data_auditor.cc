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

#include "ehrflow/data_auditor.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow {
namespace {

std::optional<double> AsNumber(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
  return std::nullopt;
}

NumericSummary SummarizeNumeric(const std::vector<double>& xs) {
  NumericSummary s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

CategoricalSummary SummarizeCategorical(const std::vector<std::string>& xs) {
  std::map<std::string, size_t> counts;
  for (const auto& x : xs) ++counts[x];
  CategoricalSummary s;
  s.unique_count = counts.size();
  for (const auto& [v, c] : counts) {
    s.frequencies.emplace_back(
        v, static_cast<double>(c) / static_cast<double>(xs.size()));
  }
  return s;
}

std::string Pct(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << fraction * 100.0 << "%";
  return os.str();
}

}  // namespace

ExpectationSet ParseExpectations(std::string_view yaml_text) {
  ExpectationSet out;
  try {
    YAML::Node root = YAML::Load(std::string(yaml_text));
    YAML::Node body = root["expectations"];
    if (!body || !body.IsMap()) {
      throw Error(ErrorCode::kParseError, "missing top-level 'expectations' map");
    }
    for (const auto& ent : body) {
      const std::string entity = ent.first.as<std::string>();
      for (const auto& var : ent.second) {
        Expectation e;
        const YAML::Node& b = var.second;
        if (b["min"]) e.min = b["min"].as<double>();
        if (b["max"]) e.max = b["max"].as<double>();
        if (b["allowed"]) e.allowed = b["allowed"].as<std::vector<std::string>>();
        if (b["max_unique"]) e.max_unique = b["max_unique"].as<size_t>();
        out[entity][var.first.as<std::string>()] = std::move(e);
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return out;
}

ExpectationSet LoadExpectations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseExpectations(buf.str());
}

std::vector<QualityFinding> AuditQuality(const EntitySet& es) {
  std::vector<QualityFinding> out;
  for (const auto& [name, entity] : es.entities) {
    for (const auto& col : entity.columns()) {
      QualityFinding f{name, col.decl.name, entity.row_count(), 0, 0.0};
      for (const auto& c : col.cells) f.missing_count += IsNull(c) ? 1 : 0;
      if (f.row_count > 0) {
        f.missing_pct = static_cast<double>(f.missing_count) /
                        static_cast<double>(f.row_count);
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<DistributionFinding> AuditDistributions(
    const EntitySet& es, const ExpectationSet* expectations) {
  if (expectations != nullptr) {
    for (const auto& [entity, vars] : *expectations) {
      const ResourceSchema* res =
          es.schema ? es.schema->FindResource(entity) : nullptr;
      for (const auto& [var, unused] : vars) {
        const bool declared =
            res != nullptr ? res->FindVariable(var) != nullptr
                           : (es.Find(entity) != nullptr &&
                              es.Find(entity)->FindColumn(var) != nullptr);
        if (!declared) {
          throw Error(ErrorCode::kUnknownVariableInExpectations,
                      entity + "." + var);
        }
      }
    }
  }

  std::vector<DistributionFinding> out;
  for (const auto& [name, entity] : es.entities) {
    for (const auto& col : entity.columns()) {
      const SemanticType type = col.decl.type;
      if (type == SemanticType::kId || type == SemanticType::kForeignKey ||
          type == SemanticType::kText) {
        continue;
      }
      DistributionFinding f;
      f.entity = name;
      f.variable = col.decl.name;
      const Expectation* exp = nullptr;
      if (expectations != nullptr) {
        auto e = expectations->find(name);
        if (e != expectations->end()) {
          auto v = e->second.find(col.decl.name);
          if (v != e->second.end()) exp = &v->second;
        }
      }
      const std::string qualified = name + "." + col.decl.name;

      if (type == SemanticType::kNumeric) {
        std::vector<double> xs;
        for (const auto& c : col.cells) {
          if (auto v = AsNumber(c)) xs.push_back(*v);
        }
        f.non_null = xs.size();
        if (!xs.empty()) {
          NumericSummary s = SummarizeNumeric(xs);
          if (exp != nullptr && exp->min && s.min < *exp->min) {
            f.violations.push_back(qualified + ": min " + FormatDouble(s.min) +
                                   " below expected min " +
                                   FormatDouble(*exp->min));
          }
          if (exp != nullptr && exp->max && s.max > *exp->max) {
            f.violations.push_back(qualified + ": max " + FormatDouble(s.max) +
                                   " above expected max " +
                                   FormatDouble(*exp->max));
          }
          f.summary = s;
        }
      } else if (type == SemanticType::kDatetime) {
        std::vector<Timestamp> ts;
        for (const auto& c : col.cells) {
          if (const auto* t = std::get_if<Timestamp>(&c)) ts.push_back(*t);
        }
        f.non_null = ts.size();
        if (!ts.empty()) {
          auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
          f.summary = DatetimeSummary{*lo, *hi};
        }
      } else {
        std::vector<std::string> xs;
        for (const auto& c : col.cells) {
          if (!IsNull(c)) xs.push_back(CellToString(c));
        }
        f.non_null = xs.size();
        if (!xs.empty()) {
          CategoricalSummary s = SummarizeCategorical(xs);
          if (exp != nullptr && exp->allowed) {
            std::set<std::string> allowed(exp->allowed->begin(),
                                          exp->allowed->end());
            for (const auto& [v, pct] : s.frequencies) {
              if (!allowed.count(v)) {
                f.violations.push_back(qualified + ": value '" + v +
                                       "' outside allowed set");
              }
            }
          }
          if (exp != nullptr && exp->max_unique &&
              s.unique_count > *exp->max_unique) {
            f.violations.push_back(
                qualified + ": " + std::to_string(s.unique_count) +
                " unique values exceed expected max_unique " +
                std::to_string(*exp->max_unique));
          }
          f.summary = std::move(s);
        }
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<CohortRow> CohortSummary(const EntitySet& es,
                                     const std::vector<std::string>& variables) {
  std::vector<CohortRow> out;
  for (const auto& qualified : variables) {
    const size_t dot = qualified.find('.');
    if (dot == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "expected entity.variable, got " + qualified);
    }
    const Entity& entity = es.Get(qualified.substr(0, dot));
    const Column* col = entity.FindColumn(qualified.substr(dot + 1));
    if (col == nullptr) throw Error(ErrorCode::kUnknownEntity, qualified);
    if (col->decl.type != SemanticType::kBoolean &&
        col->decl.type != SemanticType::kNumeric) {
      throw Error(ErrorCode::kNonBinaryVariable, qualified);
    }
    size_t pos = 0, neg = 0;
    for (const auto& c : col->cells) {
      auto v = AsNumber(c);
      if (!v) continue;
      if (*v == 1.0) {
        ++pos;
      } else if (*v == 0.0) {
        ++neg;
      } else {
        throw Error(ErrorCode::kNonBinaryVariable,
                    qualified + " contains " + FormatDouble(*v));
      }
    }
    CohortRow row{qualified, pos + neg, std::nullopt, std::nullopt};
    if (row.non_null > 0) {
      row.positive_pct = 100.0 * static_cast<double>(pos) /
                         static_cast<double>(row.non_null);
      row.negative_pct = 100.0 - *row.positive_pct;
    }
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json DataAuditReport::ToJson() const {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& f : quality) {
    q.push_back({{"entity", f.entity},
                 {"variable", f.variable},
                 {"rows", f.row_count},
                 {"missing_count", f.missing_count},
                 {"missing_pct", f.missing_pct}});
  }
  nlohmann::json d = nlohmann::json::array();
  for (const auto& f : distributions) {
    nlohmann::json j = {{"entity", f.entity},
                        {"variable", f.variable},
                        {"non_null", f.non_null},
                        {"violations", f.violations}};
    if (const auto* n = std::get_if<NumericSummary>(&f.summary)) {
      j["numeric"] = {{"min", n->min}, {"max", n->max}, {"mean", n->mean},
                      {"std", n->std}};
    } else if (const auto* c = std::get_if<CategoricalSummary>(&f.summary)) {
      nlohmann::json freq = nlohmann::json::object();
      for (const auto& [v, p] : c->frequencies) freq[v] = p;
      j["categorical"] = {{"unique_count", c->unique_count},
                          {"frequencies", freq}};
    } else if (const auto* t = std::get_if<DatetimeSummary>(&f.summary)) {
      j["datetime"] = {{"min", FormatTimestamp(t->min)},
                       {"max", FormatTimestamp(t->max)}};
    }
    d.push_back(std::move(j));
  }
  nlohmann::json c = nlohmann::json::array();
  for (const auto& r : cohort) {
    nlohmann::json j = {{"variable", r.variable}, {"non_null", r.non_null}};
    j["negative_pct"] = r.negative_pct ? nlohmann::json(*r.negative_pct) : nlohmann::json(nullptr);
    j["positive_pct"] = r.positive_pct ? nlohmann::json(*r.positive_pct) : nlohmann::json(nullptr);
    c.push_back(std::move(j));
  }
  return {{"std_convention", "population (divide by n)"},
          {"quality", q},
          {"distributions", d},
          {"cohort", c}};
}

std::string DataAuditReport::Render() const {
  std::ostringstream os;
  os << "DATA AUDIT\n";
  os << "(std is the population standard deviation)\n\n";
  os << "Missing values\n";
  for (const auto& f : quality) {
    if (f.missing_count == 0) continue;
    os << "  " << f.entity << "." << f.variable << ": " << f.missing_count
       << " of " << f.row_count << " (" << Pct(f.missing_pct) << ")\n";
  }
  os << "\nDistributions\n";
  for (const auto& f : distributions) {
    os << "  " << f.entity << "." << f.variable << ": ";
    if (const auto* n = std::get_if<NumericSummary>(&f.summary)) {
      os << "min " << FormatDouble(n->min) << ", max " << FormatDouble(n->max)
         << ", mean " << FormatDouble(n->mean) << ", std "
         << FormatDouble(n->std);
    } else if (const auto* c = std::get_if<CategoricalSummary>(&f.summary)) {
      os << c->unique_count << " unique";
      size_t shown = 0;
      for (const auto& [v, p] : c->frequencies) {
        if (shown++ == 8) {
          os << " ...";
          break;
        }
        os << (shown == 1 ? " {" : ", ") << v << ": " << Pct(p);
      }
      if (!c->frequencies.empty() && shown <= 8) os << "}";
    } else if (const auto* t = std::get_if<DatetimeSummary>(&f.summary)) {
      os << FormatTimestamp(t->min) << " .. " << FormatTimestamp(t->max);
    } else {
      os << "all null";
    }
    os << "\n";
    for (const auto& v : f.violations) os << "    ! " << v << "\n";
  }
  if (!cohort.empty()) {
    os << "\nCohort                 Negative   Positive\n";
    for (const auto& r : cohort) {
      os << "  " << std::left << std::setw(20) << r.variable << " ";
      if (r.positive_pct) {
        os << std::right << std::setw(8) << Pct(*r.negative_pct / 100.0) << "  "
           << std::setw(8) << Pct(*r.positive_pct / 100.0);
      } else {
        os << "no data";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace ehrflow
