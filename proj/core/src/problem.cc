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

#include "ehrflow/problem.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow {
namespace {

constexpr std::pair<ProblemName, std::string_view> kProblemNames[] = {
    {ProblemName::kNoShow, "noshow"},
    {ProblemName::kLosClassification, "los_classification"},
    {ProblemName::kLosRegression, "los_regression"},
    {ProblemName::kReadmission, "readmission"},
    {ProblemName::kDiagnosis, "diagnosis"},
    {ProblemName::kMortality, "mortality"},
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string NormalizeCode(std::string_view code) {
  std::string out;
  for (char c : code) {
    if (c == '.' || std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

const std::string* StringAt(const Column* col, size_t row) {
  if (col == nullptr) return nullptr;
  return std::get_if<std::string>(&col->cells[row]);
}

std::optional<Timestamp> TimeAt(const Column* col, size_t row) {
  if (col == nullptr) return std::nullopt;
  if (const auto* t = std::get_if<Timestamp>(&col->cells[row])) return *t;
  return std::nullopt;
}

// The active relation child -> target, if any.
const RelationshipDecl* ChildRelation(const EntitySet& es,
                                      std::string_view child,
                                      std::string_view target) {
  for (const auto& r : es.relations) {
    if (r.child_resource == child && r.parent_resource == target) return &r;
  }
  return nullptr;
}

// target row -> normalized codes carried by its rows in `entity`.
std::vector<std::vector<std::string>> CodesByTarget(const EntitySet& es,
                                                    const Entity& target,
                                                    const ProblemSpec& spec) {
  const auto& p = spec.params;
  const RelationshipDecl* rel =
      ChildRelation(es, p.diagnosis_entity, target.name());
  if (rel == nullptr) {
    throw Error(ErrorCode::kUnknownEntity,
                p.diagnosis_entity + " is not linked to " + target.name());
  }
  const Entity& diag = es.Get(p.diagnosis_entity);
  const Column* fk = diag.FindColumn(rel->child_variable);
  const Column* code = diag.FindColumn(p.code_variable);
  if (code == nullptr) {
    throw Error(ErrorCode::kMissingParam,
                p.diagnosis_entity + "." + p.code_variable + " is not loaded");
  }
  std::vector<std::vector<std::string>> out(target.row_count());
  for (size_t r = 0; r < diag.row_count(); ++r) {
    const std::string* id = StringAt(fk, r);
    const Cell& c = code->cells[r];
    if (id == nullptr || IsNull(c)) continue;
    if (auto row = target.RowOf(*id)) {
      out[*row].push_back(NormalizeCode(CellToString(c)));
    }
  }
  return out;
}

std::optional<double> StoredLabel(const Cell& c, const ProblemSpec& spec) {
  if (IsNull(c)) return std::nullopt;
  if (spec.task_type == TaskType::kRegression) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::nullopt;
  }
  if (const auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
  if (const auto* d = std::get_if<double>(&c)) {
    if (*d == 0.0 || *d == 1.0) return *d;
    return std::nullopt;
  }
  const std::string v = Lower(CellToString(c));
  for (const auto& pos : spec.params.positive_values) {
    if (Lower(pos) == v) return 1.0;
  }
  return 0.0;
}

}  // namespace

std::string_view ProblemNameString(ProblemName name) {
  for (const auto& [n, s] : kProblemNames) {
    if (n == name) return s;
  }
  return "unknown";
}

std::optional<ProblemName> ParseProblemName(std::string_view name) {
  for (const auto& [n, s] : kProblemNames) {
    if (s == name) return n;
  }
  return std::nullopt;
}

const std::vector<std::string>& DefaultMortalityCodes() {
  static const std::vector<std::string> codes = {
      // ICD-9: motor vehicle and other transport (E800-E848), self-harm
      // (E950-E959), assault (E960-E969).
      "E80", "E81", "E82", "E83", "E840", "E841", "E842", "E843", "E844",
      "E845", "E846", "E847", "E848", "E95", "E96",
      // ICD-10: transport accidents (V01-V99), self-harm (X60-X84), assault
      // (X85-Y09).
      "V", "X6", "X7", "X80", "X81", "X82", "X83", "X84", "X85", "X86", "X87",
      "X88", "X89", "X9", "Y0"};
  return codes;
}

ProblemSpec ProblemSpec::Defaults(ProblemName name) {
  ProblemSpec s;
  s.name = name;
  s.target_entity = "encounter";
  s.params.start_variable = "start";
  s.params.end_variable = "end";
  switch (name) {
    case ProblemName::kNoShow:
      s.target_entity = "appointment";
      s.params.start_variable = "created";
      s.params.end_variable = "start";
      s.params.label_variable = "status";
      s.params.positive_values = {"noshow", "no-show", "no_show", "no show",
                                  "yes", "true", "1"};
      break;
    case ProblemName::kLosClassification:
      s.params.threshold_days = 7;
      break;
    case ProblemName::kLosRegression:
      s.task_type = TaskType::kRegression;
      break;
    case ProblemName::kReadmission:
      s.anchor = Anchor::kEventEnd;
      s.params.readmission_window = std::chrono::days{30};
      break;
    case ProblemName::kDiagnosis:
      break;
    case ProblemName::kMortality:
      s.params.label_variable = "expired";
      s.params.mortality_codes = DefaultMortalityCodes();
      break;
  }
  return s;
}

void ProblemSpec::Validate() const {
  const std::string prefix = std::string(ProblemNameString(name)) + ": ";
  if (target_entity.empty()) {
    throw Error(ErrorCode::kMissingParam, prefix + "target entity");
  }
  if (AnchorVariable().empty()) {
    throw Error(ErrorCode::kMissingParam, prefix + "anchor variable");
  }
  switch (name) {
    case ProblemName::kReadmission:
      if (!params.readmission_window) {
        throw Error(ErrorCode::kMissingParam, prefix + "readmission_window");
      }
      if (params.end_variable.empty() || params.patient_variable.empty()) {
        throw Error(ErrorCode::kMissingParam,
                    prefix + "end_variable and patient_variable");
      }
      break;
    case ProblemName::kLosClassification:
      if (!params.threshold_days) {
        throw Error(ErrorCode::kMissingParam, prefix + "threshold_days");
      }
      [[fallthrough]];
    case ProblemName::kLosRegression:
      if (params.start_variable.empty() || params.end_variable.empty()) {
        throw Error(ErrorCode::kMissingParam,
                    prefix + "start_variable and end_variable");
      }
      break;
    case ProblemName::kDiagnosis:
      if (!params.diagnosis_code || params.diagnosis_code->empty()) {
        throw Error(ErrorCode::kMissingParam, prefix + "diagnosis_code");
      }
      break;
    case ProblemName::kMortality:
      if (params.mortality_codes.empty() && params.label_variable.empty()) {
        throw Error(ErrorCode::kMissingParam, prefix + "mortality_codes");
      }
      break;
    case ProblemName::kNoShow:
      break;
  }
  const bool regression = name == ProblemName::kLosRegression;
  if ((task_type == TaskType::kRegression) != regression) {
    throw Error(ErrorCode::kInvalidArgument,
                prefix + "task type does not match the problem");
  }
}

const std::string& ProblemSpec::AnchorVariable() const {
  return anchor == Anchor::kEventStart ? params.start_variable
                                       : params.end_variable;
}

std::vector<std::string> ProblemSpec::LeakyVariables() const {
  std::vector<std::string> out;
  if (!params.label_variable.empty()) {
    out.push_back(target_entity + "." + params.label_variable);
  }
  if ((name == ProblemName::kLosClassification ||
       name == ProblemName::kLosRegression) &&
      !params.end_variable.empty()) {
    out.push_back(target_entity + "." + params.end_variable);
  }
  return out;
}

nlohmann::json ProblemSpec::ToJson() const {
  nlohmann::json j = {
      {"name", std::string(ProblemNameString(name))},
      {"target", target_entity},
      {"anchor", anchor == Anchor::kEventStart ? "event_start" : "event_end"},
      {"offset", FormatDuration(offset)},
      {"task_type", std::string(TaskTypeName(task_type))},
      {"start_variable", params.start_variable},
      {"end_variable", params.end_variable},
      {"patient_variable", params.patient_variable},
      {"label_variable", params.label_variable},
      {"positive_values", params.positive_values},
      {"mortality_codes", params.mortality_codes},
      {"diagnosis_entity", params.diagnosis_entity},
      {"code_variable", params.code_variable},
      {"attendance_entity", params.attendance_entity},
  };
  if (params.readmission_window) {
    j["window"] = FormatDuration(*params.readmission_window);
  }
  if (params.threshold_days) j["threshold_days"] = *params.threshold_days;
  if (params.diagnosis_code) j["diagnosis_code"] = *params.diagnosis_code;
  return j;
}

ProblemSpec ProblemSpec::FromJson(const nlohmann::json& j) {
  auto name = ParseProblemName(j.at("name").get<std::string>());
  if (!name) throw Error(ErrorCode::kParseError, "unknown problem name");
  ProblemSpec s = Defaults(*name);
  auto str = [&](const char* key, std::string* out) {
    if (j.contains(key)) *out = j.at(key).get<std::string>();
  };
  str("target", &s.target_entity);
  if (j.contains("anchor")) {
    s.anchor = j.at("anchor") == "event_end" ? Anchor::kEventEnd
                                             : Anchor::kEventStart;
  }
  if (j.contains("offset")) {
    auto d = ParseDuration(j.at("offset").get<std::string>());
    if (!d) throw Error(ErrorCode::kParseError, "bad offset");
    s.offset = *d;
  }
  if (j.contains("task_type")) {
    auto t = ParseTaskType(j.at("task_type").get<std::string>());
    if (!t) throw Error(ErrorCode::kParseError, "bad task_type");
    s.task_type = *t;
  }
  str("start_variable", &s.params.start_variable);
  str("end_variable", &s.params.end_variable);
  str("patient_variable", &s.params.patient_variable);
  str("label_variable", &s.params.label_variable);
  str("diagnosis_entity", &s.params.diagnosis_entity);
  str("code_variable", &s.params.code_variable);
  str("attendance_entity", &s.params.attendance_entity);
  if (j.contains("positive_values")) {
    s.params.positive_values = j.at("positive_values").get<std::vector<std::string>>();
  }
  if (j.contains("mortality_codes")) {
    s.params.mortality_codes = j.at("mortality_codes").get<std::vector<std::string>>();
  }
  if (j.contains("window")) {
    auto d = ParseDuration(j.at("window").get<std::string>());
    if (!d) throw Error(ErrorCode::kParseError, "bad window");
    s.params.readmission_window = *d;
  }
  if (j.contains("threshold_days")) s.params.threshold_days = j.at("threshold_days").get<int>();
  if (j.contains("diagnosis_code")) {
    s.params.diagnosis_code = j.at("diagnosis_code").get<std::string>();
  }
  return s;
}

ProblemSpec ParseProblemSpec(std::string_view yaml_text) {
  YAML::Node node;
  try {
    node = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!node.IsMap() || !node["name"]) {
    throw Error(ErrorCode::kParseError, "problem block needs a 'name'");
  }
  nlohmann::json j = nlohmann::json::object();
  try {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (kv.second.IsSequence()) {
        j[key == "target_entity" ? "target" : key] =
            kv.second.as<std::vector<std::string>>();
      } else if (key == "threshold_days") {
        j[key] = kv.second.as<int>();
      } else {
        j[key == "target_entity" ? "target" : key] = kv.second.as<std::string>();
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return ProblemSpec::FromJson(j);
}

size_t LabelTimes::PositiveCount() const {
  size_t n = 0;
  for (const auto& r : rows) n += r.label == 1.0 ? 1 : 0;
  return n;
}

Timestamp Gct(const EntitySet& es, const ProblemSpec& spec,
              std::string_view entity_id) {
  const Entity& target = es.Get(spec.target_entity);
  auto row = target.RowOf(entity_id);
  if (!row) {
    throw Error(ErrorCode::kUnknownEntity,
                spec.target_entity + " has no row '" + std::string(entity_id) + "'");
  }
  auto t = TimeAt(target.FindColumn(spec.AnchorVariable()), *row);
  if (!t) {
    throw Error(ErrorCode::kMissingAnchorTime,
                spec.target_entity + " '" + std::string(entity_id) + "' has no " +
                    spec.AnchorVariable());
  }
  return *t + spec.offset;
}

LabelTimes GenerateLabelTimes(const EntitySet& es, const ProblemSpec& spec) {
  spec.Validate();
  const Entity* target_ptr = es.Find(spec.target_entity);
  if (target_ptr == nullptr) {
    throw Error(ErrorCode::kUnknownTargetEntity, spec.target_entity);
  }
  const Entity& target = *target_ptr;
  const auto& p = spec.params;

  LabelTimes out;
  out.problem = spec;
  out.candidate_count = target.row_count();

  const Column* stored =
      p.label_variable.empty() ? nullptr : target.FindColumn(p.label_variable);
  const Column* start = target.FindColumn(p.start_variable);
  const Column* end = target.FindColumn(p.end_variable);

  // Per-problem precomputation for the labeling functions.
  std::vector<std::vector<std::string>> codes;
  std::vector<bool> attended;
  // patient id -> (start, row) sorted by start.
  std::map<std::string, std::vector<std::pair<Timestamp, size_t>>> by_patient;
  const Column* patient = nullptr;

  if (stored == nullptr) {
    switch (spec.name) {
      case ProblemName::kNoShow: {
        const RelationshipDecl* rel =
            ChildRelation(es, p.attendance_entity, target.name());
        if (rel == nullptr) {
          throw Error(ErrorCode::kMissingParam,
                      "noshow: no stored " + p.label_variable +
                          " column and no " + p.attendance_entity +
                          " rows linked to " + target.name());
        }
        attended.assign(target.row_count(), false);
        const Entity& att = es.Get(p.attendance_entity);
        const Column* fk = att.FindColumn(rel->child_variable);
        for (size_t r = 0; r < att.row_count(); ++r) {
          if (const std::string* id = StringAt(fk, r)) {
            if (auto row = target.RowOf(*id)) attended[*row] = true;
          }
        }
        break;
      }
      case ProblemName::kDiagnosis:
      case ProblemName::kMortality:
        codes = CodesByTarget(es, target, spec);
        break;
      case ProblemName::kReadmission: {
        patient = target.FindColumn(p.patient_variable);
        if (patient == nullptr) {
          throw Error(ErrorCode::kMissingParam,
                      "readmission: " + target.name() + "." +
                          p.patient_variable + " is not loaded");
        }
        for (size_t r = 0; r < target.row_count(); ++r) {
          const std::string* pid = StringAt(patient, r);
          auto s = TimeAt(start, r);
          if (pid != nullptr && s) by_patient[*pid].emplace_back(*s, r);
        }
        for (auto& [pid, v] : by_patient) std::sort(v.begin(), v.end());
        break;
      }
      default:
        break;
    }
  }

  std::vector<std::string> prefixes;
  for (const auto& c : p.mortality_codes) prefixes.push_back(NormalizeCode(c));
  const std::string wanted =
      p.diagnosis_code ? NormalizeCode(*p.diagnosis_code) : std::string();

  for (size_t r = 0; r < target.row_count(); ++r) {
    const std::string& id = target.IdAt(r);
    auto anchor = TimeAt(target.FindColumn(spec.AnchorVariable()), r);
    if (!anchor) {
      out.notes.push_back(id + ": MissingAnchorTime (" + spec.AnchorVariable() +
                          " is null)");
      continue;
    }
    const Timestamp cutoff = *anchor + spec.offset;

    std::optional<double> label;
    std::string why;
    if (stored != nullptr) {
      label = StoredLabel(stored->cells[r], spec);
      if (!label) why = "stored " + p.label_variable + " is null or invalid";
    } else {
      switch (spec.name) {
        case ProblemName::kNoShow:
          label = attended[r] ? 0.0 : 1.0;
          break;
        case ProblemName::kLosClassification:
        case ProblemName::kLosRegression: {
          auto s = TimeAt(start, r);
          auto e = TimeAt(end, r);
          if (!s || !e) {
            why = "admission or discharge time is null";
            break;
          }
          const double days = ToDays(*e - *s);
          label = spec.name == ProblemName::kLosRegression
                      ? days
                      : (days > *p.threshold_days ? 1.0 : 0.0);
          break;
        }
        case ProblemName::kReadmission: {
          auto e = TimeAt(end, r);
          const std::string* pid = StringAt(patient, r);
          if (!e) {
            why = "discharge time is null";
            break;
          }
          if (pid == nullptr) {
            why = "patient is null";
            break;
          }
          const Timestamp horizon = *e + *p.readmission_window;
          const auto& visits = by_patient[*pid];
          auto it = std::upper_bound(
              visits.begin(), visits.end(), std::make_pair(*e, SIZE_MAX),
              [](const auto& a, const auto& b) { return a.first < b.first; });
          label = 0.0;
          for (; it != visits.end() && it->first <= horizon; ++it) {
            if (it->second != r) {
              label = 1.0;
              break;
            }
          }
          break;
        }
        case ProblemName::kDiagnosis: {
          const auto& c = codes[r];
          label = std::find(c.begin(), c.end(), wanted) != c.end() ? 1.0 : 0.0;
          break;
        }
        case ProblemName::kMortality: {
          label = 0.0;
          for (const auto& code : codes[r]) {
            for (const auto& pre : prefixes) {
              if (code.compare(0, pre.size(), pre) == 0) label = 1.0;
            }
          }
          break;
        }
      }
    }
    if (!label) {
      out.notes.push_back(id + ": label not computable (" + why + ")");
      continue;
    }
    out.rows.push_back({id, cutoff, *label});
  }
  return out;
}

std::filesystem::path LabelMetaPath(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void WriteLabelTimes(const std::filesystem::path& csv_path,
                     const LabelTimes& labels) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + csv_path.string());
  WriteCsvRow(out, {"entity_id", "cutoff_time", "label"});
  for (const auto& r : labels.rows) {
    WriteCsvRow(out, {r.entity_id, FormatTimestamp(r.cutoff_time),
                      FormatDouble(r.label)});
  }
  nlohmann::json meta = {{"problem", labels.problem.ToJson()},
                         {"candidates", labels.candidate_count},
                         {"rows", labels.rows.size()},
                         {"excluded", labels.notes}};
  std::ofstream m(LabelMetaPath(csv_path), std::ios::binary);
  m << meta.dump(2) << "\n";
}

LabelTimes ReadLabelTimes(const std::filesystem::path& csv_path) {
  CsvTable t = ReadCsv(csv_path);
  const int id = t.ColumnIndex("entity_id");
  const int cut = t.ColumnIndex("cutoff_time");
  const int lab = t.ColumnIndex("label");
  if (id < 0 || cut < 0 || lab < 0) {
    throw Error(ErrorCode::kParseError,
                csv_path.string() + ": expected entity_id,cutoff_time,label");
  }
  LabelTimes out;
  for (const auto& row : t.rows) {
    auto ts = ParseTimestamp(row[cut]);
    if (!ts) throw Error(ErrorCode::kParseError, "bad cutoff_time " + row[cut]);
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(row[lab], &used);
      if (used != row[lab].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "bad label " + row[lab]);
    }
    out.rows.push_back({row[id], *ts, v});
  }
  out.candidate_count = out.rows.size();
  const auto meta_path = LabelMetaPath(csv_path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    nlohmann::json meta = nlohmann::json::parse(in);
    out.problem = ProblemSpec::FromJson(meta.at("problem"));
    out.candidate_count = meta.value("candidates", out.rows.size());
    if (meta.contains("excluded")) {
      out.notes = meta.at("excluded").get<std::vector<std::string>>();
    }
  }
  return out;
}

}  // namespace ehrflow
