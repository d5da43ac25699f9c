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

#include "ehrflow/featurizer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow {

std::string_view OutputTypeName(OutputType t) {
  switch (t) {
    case OutputType::kNumeric: return "numeric";
    case OutputType::kCategorical: return "categorical";
    case OutputType::kBoolean: return "boolean";
  }
  return "numeric";
}

std::optional<OutputType> ParseOutputType(std::string_view s) {
  if (s == "numeric") return OutputType::kNumeric;
  if (s == "categorical") return OutputType::kCategorical;
  if (s == "boolean") return OutputType::kBoolean;
  return std::nullopt;
}

FeatureTable FeatureTable::Take(const std::vector<size_t>& row_indices) const {
  FeatureTable out;
  out.rows = row_indices.size();
  out.columns.reserve(columns.size());
  for (const auto& c : columns) {
    FeatureColumn col{c.name, c.type, {}};
    col.values.reserve(row_indices.size());
    for (size_t r : row_indices) col.values.push_back(c.values.at(r));
    out.columns.push_back(std::move(col));
  }
  return out;
}

const FeatureColumn* FeatureTable::Find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string_view FeatureKindName(FeatureKind k) {
  switch (k) {
    case FeatureKind::kDirect: return "direct";
    case FeatureKind::kTransform: return "transform";
    case FeatureKind::kAggregation: return "aggregation";
  }
  return "direct";
}

const std::vector<std::string>& DefaultAggregationPrimitives() {
  static const std::vector<std::string> p = {"sum",  "std",  "max",   "min",
                                             "skew", "mean", "count", "mode"};
  return p;
}

const std::vector<std::string>& DefaultTransformPrimitives() {
  static const std::vector<std::string> p = {"day", "month", "year",
                                             "is_weekend"};
  return p;
}

namespace {

const std::set<std::string>& NumericAggregations() {
  static const std::set<std::string> s = {"sum", "std", "max",
                                          "min", "skew", "mean"};
  return s;
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void CheckPrimitives(const FeaturizerSettings& settings) {
  for (const auto& p : settings.agg_primitives) {
    if (!NumericAggregations().count(p) && p != "count" && p != "mode") {
      throw Error(ErrorCode::kInvalidArgument, "unknown aggregation primitive " + p);
    }
  }
  for (const auto& p : settings.transform_primitives) {
    if (p != "day" && p != "month" && p != "year" && p != "is_weekend") {
      throw Error(ErrorCode::kInvalidArgument, "unknown transform primitive " + p);
    }
  }
  if (settings.max_depth < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_depth must be >= 0");
  }
}

class Enumerator {
 public:
  Enumerator(const EntitySet& es, const FeaturizerSettings& settings)
      : es_(es), settings_(settings) {
    excluded_.insert(settings.exclude.begin(), settings.exclude.end());
    relations_ = es.relations;
    std::sort(relations_.begin(), relations_.end());
  }

  std::vector<FeatureNodePtr> Build(const std::string& entity_name,
                                    int remaining,
                                    const RelationshipDecl* arrived_down) {
    const Entity& entity = es_.Get(entity_name);
    std::vector<FeatureNodePtr> out;
    for (const auto& col : entity.columns()) {
      const auto& decl = col.decl;
      if (decl.name == entity.index()) continue;
      if (excluded_.count(entity_name + "." + decl.name)) continue;
      switch (decl.type) {
        case SemanticType::kNumeric:
        case SemanticType::kBoolean:
        case SemanticType::kCategorical: {
          auto node = std::make_shared<FeatureNode>();
          node->op = FeatureNode::Op::kIdentity;
          node->entity = entity_name;
          node->variable = decl.name;
          node->primitive = "identity";
          node->output_type = decl.type == SemanticType::kNumeric
                                  ? OutputType::kNumeric
                                  : decl.type == SemanticType::kBoolean
                                        ? OutputType::kBoolean
                                        : OutputType::kCategorical;
          node->name = decl.name;
          out.push_back(std::move(node));
          break;
        }
        case SemanticType::kDatetime:
          for (const auto& prim : settings_.transform_primitives) {
            auto node = std::make_shared<FeatureNode>();
            node->op = FeatureNode::Op::kTransform;
            node->entity = entity_name;
            node->variable = decl.name;
            node->primitive = prim;
            node->output_type = prim == "is_weekend" ? OutputType::kBoolean
                                                     : OutputType::kNumeric;
            node->name = Upper(prim) + "(" + decl.name + ")";
            out.push_back(std::move(node));
          }
          break;
        default:
          break;
      }
    }
    if (remaining <= 0) return out;

    for (const auto& rel : relations_) {
      if (rel.parent_resource != entity_name) continue;
      const std::string prefix = Prefix(rel, rel.child_resource, true);
      auto sub = Build(rel.child_resource, remaining - 1, &rel);
      for (const auto& prim : settings_.agg_primitives) {
        if (prim == "count") {
          auto node = MakeAggregate(entity_name, rel, prim, nullptr);
          node->name = "COUNT(" + prefix + ")";
          node->depth = 1;
          out.push_back(std::move(node));
          continue;
        }
        for (const auto& f : sub) {
          const bool ok = prim == "mode"
                              ? f->output_type == OutputType::kCategorical
                              : f->output_type == OutputType::kNumeric;
          if (!ok) continue;
          auto node = MakeAggregate(entity_name, rel, prim, f);
          node->output_type =
              prim == "mode" ? OutputType::kCategorical : OutputType::kNumeric;
          node->name = Upper(prim) + "(" + prefix + "." + f->name + ")";
          out.push_back(std::move(node));
        }
      }
    }

    for (const auto& rel : relations_) {
      if (rel.child_resource != entity_name) continue;
      if (arrived_down != nullptr && rel == *arrived_down) continue;
      const std::string prefix = Prefix(rel, rel.parent_resource, false);
      for (const auto& f : Build(rel.parent_resource, remaining - 1, nullptr)) {
        auto node = std::make_shared<FeatureNode>();
        node->op = FeatureNode::Op::kParent;
        node->entity = entity_name;
        node->relation = rel;
        node->input = f;
        node->output_type = f->output_type;
        node->depth = f->depth + 1;
        node->name = prefix + "." + f->name;
        out.push_back(std::move(node));
      }
    }
    return out;
  }

 private:
  std::shared_ptr<FeatureNode> MakeAggregate(const std::string& entity,
                                             const RelationshipDecl& rel,
                                             const std::string& prim,
                                             const FeatureNodePtr& input) {
    auto node = std::make_shared<FeatureNode>();
    node->op = FeatureNode::Op::kAggregate;
    node->entity = entity;
    node->relation = rel;
    node->primitive = prim;
    node->input = input;
    node->output_type = OutputType::kNumeric;
    node->depth = input ? input->depth + 1 : 1;
    return node;
  }

  // "other" or "other[fk]" when more than one relation joins the same pair.
  std::string Prefix(const RelationshipDecl& rel, const std::string& other,
                     bool) const {
    size_t n = 0;
    for (const auto& r : relations_) {
      if (r.child_resource == rel.child_resource &&
          r.parent_resource == rel.parent_resource) {
        ++n;
      }
    }
    return n > 1 ? other + "[" + rel.child_variable + "]" : other;
  }

  const EntitySet& es_;
  const FeaturizerSettings& settings_;
  std::set<std::string> excluded_;
  std::vector<RelationshipDecl> relations_;
};

FeatureDef MakeDef(const FeatureNodePtr& root) {
  FeatureDef def;
  def.name = root->name;
  def.depth = root->depth;
  def.output_type = root->output_type;
  def.root = root;
  def.kind = FeatureKind::kDirect;
  def.primitive = "identity";
  bool classified = false;
  for (const FeatureNode* n = root.get(); n != nullptr; n = n->input.get()) {
    if (n->op == FeatureNode::Op::kAggregate || n->op == FeatureNode::Op::kParent) {
      def.path.push_back(n->relation);
    }
    if (classified) continue;
    if (n->op == FeatureNode::Op::kAggregate) {
      def.kind = FeatureKind::kAggregation;
      def.primitive = n->primitive;
      classified = true;
    } else if (n->op == FeatureNode::Op::kTransform) {
      def.kind = FeatureKind::kTransform;
      def.primitive = n->primitive;
      classified = true;
    }
  }
  return def;
}

// Compiled evaluation plan: nodes index into shared relation indexes.
struct RelationIndex {
  const Entity* child = nullptr;
  const Entity* parent = nullptr;
  std::vector<int64_t> parent_row;                // per child row, -1 if none
  std::vector<std::vector<uint32_t>> children;    // per parent row
};

struct CompiledNode {
  FeatureNode::Op op;
  const Entity* entity = nullptr;
  const Column* column = nullptr;
  std::string primitive;
  const RelationIndex* relation = nullptr;
  int input = -1;
  OutputType output_type = OutputType::kNumeric;
};

bool RowVisible(const Entity& entity, const Column* time_col, size_t row,
                Timestamp cutoff) {
  if (!entity.time_index()) return true;
  if (time_col == nullptr) return false;
  const auto* t = std::get_if<Timestamp>(&time_col->cells[row]);
  return t != nullptr && *t <= cutoff;
}

class Evaluator {
 public:
  Evaluator(const EntitySet& es, const std::vector<FeatureDef>& defs) : es_(es) {
    for (const auto& [name, e] : es.entities) {
      time_cols_[&e] = e.time_index() ? e.FindColumn(*e.time_index()) : nullptr;
    }
    for (const auto& d : defs) roots_.push_back(Compile(*d.root));
  }

  FeatureValue Eval(size_t def, size_t row, Timestamp cutoff) const {
    return EvalNode(roots_[def], row, cutoff);
  }

 private:
  int Compile(const FeatureNode& node) {
    CompiledNode c;
    c.op = node.op;
    c.entity = &es_.Get(node.entity);
    c.primitive = node.primitive;
    c.output_type = node.output_type;
    if (node.op == FeatureNode::Op::kIdentity ||
        node.op == FeatureNode::Op::kTransform) {
      c.column = c.entity->FindColumn(node.variable);
      if (c.column == nullptr) {
        throw Error(ErrorCode::kInvalidArgument,
                    "feature " + node.name + " needs missing column " +
                        node.entity + "." + node.variable);
      }
    } else {
      c.relation = &Index(node.relation);
      if (node.input) c.input = Compile(*node.input);
    }
    nodes_.push_back(std::move(c));
    return static_cast<int>(nodes_.size() - 1);
  }

  const RelationIndex& Index(const RelationshipDecl& rel) {
    auto it = indexes_.find(rel);
    if (it != indexes_.end()) return *it->second;
    if (std::find(es_.relations.begin(), es_.relations.end(), rel) ==
        es_.relations.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "relation " + rel.ToString() + " is not active");
    }
    auto idx = std::make_unique<RelationIndex>();
    idx->child = &es_.Get(rel.child_resource);
    idx->parent = &es_.Get(rel.parent_resource);
    const Column* fk = idx->child->FindColumn(rel.child_variable);
    idx->parent_row.assign(idx->child->row_count(), -1);
    idx->children.resize(idx->parent->row_count());
    for (size_t r = 0; r < idx->child->row_count(); ++r) {
      const auto* id = std::get_if<std::string>(&fk->cells[r]);
      if (id == nullptr) continue;
      if (auto p = idx->parent->RowOf(*id)) {
        idx->parent_row[r] = static_cast<int64_t>(*p);
        idx->children[*p].push_back(static_cast<uint32_t>(r));
      }
    }
    const RelationIndex& ref = *idx;
    indexes_.emplace(rel, std::move(idx));
    return ref;
  }

  bool Visible(const Entity* e, size_t row, Timestamp cutoff) const {
    return RowVisible(*e, time_cols_.at(e), row, cutoff);
  }

  FeatureValue EvalNode(int id, size_t row, Timestamp cutoff) const {
    const CompiledNode& n = nodes_[id];
    switch (n.op) {
      case FeatureNode::Op::kIdentity: {
        if (!Visible(n.entity, row, cutoff)) return {};
        const Cell& c = n.column->cells[row];
        if (const auto* d = std::get_if<double>(&c)) return *d;
        if (const auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
        if (const auto* s = std::get_if<std::string>(&c)) return *s;
        return {};
      }
      case FeatureNode::Op::kTransform: {
        if (!Visible(n.entity, row, cutoff)) return {};
        const auto* t = std::get_if<Timestamp>(&n.column->cells[row]);
        if (t == nullptr) return {};
        const CivilDate d = ToCivil(*t);
        if (n.primitive == "day") return static_cast<double>(d.day);
        if (n.primitive == "month") return static_cast<double>(d.month);
        if (n.primitive == "year") return static_cast<double>(d.year);
        return d.weekend ? 1.0 : 0.0;
      }
      case FeatureNode::Op::kParent: {
        const int64_t p = n.relation->parent_row[row];
        if (p < 0 || !Visible(n.relation->parent, static_cast<size_t>(p), cutoff)) {
          return {};
        }
        return EvalNode(n.input, static_cast<size_t>(p), cutoff);
      }
      case FeatureNode::Op::kAggregate: {
        const auto& kids = n.relation->children[row];
        if (n.input < 0) {
          size_t count = 0;
          for (uint32_t k : kids) count += Visible(n.relation->child, k, cutoff) ? 1 : 0;
          return static_cast<double>(count);
        }
        if (n.primitive == "mode") {
          std::vector<std::string> vals;
          for (uint32_t k : kids) {
            if (!Visible(n.relation->child, k, cutoff)) continue;
            FeatureValue v = EvalNode(n.input, k, cutoff);
            if (auto* s = std::get_if<std::string>(&v)) vals.push_back(std::move(*s));
          }
          return AggregateMode(vals);
        }
        std::vector<double> vals;
        for (uint32_t k : kids) {
          if (!Visible(n.relation->child, k, cutoff)) continue;
          FeatureValue v = EvalNode(n.input, k, cutoff);
          if (const auto* d = std::get_if<double>(&v)) vals.push_back(*d);
        }
        return AggregateNumeric(n.primitive, vals);
      }
    }
    return {};
  }

  const EntitySet& es_;
  std::vector<CompiledNode> nodes_;
  std::vector<int> roots_;
  std::map<RelationshipDecl, std::unique_ptr<RelationIndex>> indexes_;
  std::map<const Entity*, const Column*> time_cols_;
};

}  // namespace

nlohmann::json FeatureDef::ToJson() const {
  nlohmann::json path_json = nlohmann::json::array();
  for (const auto& r : path) path_json.push_back(r.ToString());
  return {{"name", name},
          {"kind", std::string(FeatureKindName(kind))},
          {"primitive", primitive},
          {"depth", depth},
          {"output_type", std::string(OutputTypeName(output_type))},
          {"path", path_json}};
}

CutoffView::CutoffView(const EntitySet& es, Timestamp cutoff)
    : es_(&es), cutoff_(cutoff) {}

bool CutoffView::Visible(const Entity& entity, size_t row) const {
  const Column* t =
      entity.time_index() ? entity.FindColumn(*entity.time_index()) : nullptr;
  return RowVisible(entity, t, row, cutoff_);
}

std::vector<size_t> CutoffView::VisibleRows(std::string_view entity) const {
  const Entity& e = es_->Get(entity);
  std::vector<size_t> rows;
  for (size_t r = 0; r < e.row_count(); ++r) {
    if (Visible(e, r)) rows.push_back(r);
  }
  return rows;
}

CutoffView ApplyCutoff(const EntitySet& es, Timestamp cutoff) {
  return CutoffView(es, cutoff);
}

std::vector<FeatureDef> EnumerateFeatures(const EntitySet& es,
                                          const std::string& target_entity,
                                          const FeaturizerSettings& settings) {
  CheckPrimitives(settings);
  if (es.Find(target_entity) == nullptr) {
    throw Error(ErrorCode::kUnknownEntity, target_entity);
  }
  Enumerator enumerator(es, settings);
  std::vector<FeatureDef> defs;
  std::set<std::string> names;
  for (const auto& node : enumerator.Build(target_entity, settings.max_depth, nullptr)) {
    if (!names.insert(node->name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate feature name " + node->name);
    }
    defs.push_back(MakeDef(node));
  }
  return defs;
}

FeatureValue AggregateNumeric(std::string_view primitive,
                              const std::vector<double>& values) {
  if (primitive == "count") return static_cast<double>(values.size());
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  if (primitive == "sum") {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  if (primitive == "max") return *std::max_element(values.begin(), values.end());
  if (primitive == "min") return *std::min_element(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (primitive == "mean") return mean;
  double m2 = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (primitive == "std") return std::sqrt(m2);
  if (primitive == "skew") {
    // Adjusted Fisher-Pearson coefficient; undefined below 3 values or with
    // zero spread.
    if (values.size() < 3 || m2 <= 0.0) return {};
    const double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown numeric aggregation " + std::string(primitive));
}

FeatureValue AggregateMode(const std::vector<std::string>& values) {
  if (values.empty()) return {};
  std::map<std::string, size_t> counts;
  for (const auto& v : values) ++counts[v];
  const std::string* best = nullptr;
  size_t best_count = 0;
  for (const auto& [v, c] : counts) {  // ascending: ties keep the smallest
    if (c > best_count) {
      best = &v;
      best_count = c;
    }
  }
  return *best;
}

FeatureMatrix ComputeFeatureMatrix(const EntitySet& es,
                                   const LabelTimes& labels,
                                   const std::vector<FeatureDef>& defs,
                                   size_t jobs) {
  FeatureMatrix fm;
  fm.defs = defs;
  const size_t n = labels.rows.size();
  fm.table.rows = n;
  for (const auto& d : defs) {
    fm.table.columns.push_back({d.name, d.output_type, std::vector<FeatureValue>(n)});
  }
  if (defs.empty() && n == 0) return fm;

  std::string target;
  for (const auto& d : defs) {
    target = d.root->entity;
    break;
  }
  if (target.empty()) target = labels.problem.target_entity;
  const Entity& entity = es.Get(target);

  std::vector<int64_t> rows(n, -1);
  for (size_t i = 0; i < n; ++i) {
    fm.entity_ids.push_back(labels.rows[i].entity_id);
    fm.cutoffs.push_back(labels.rows[i].cutoff_time);
    if (auto r = entity.RowOf(labels.rows[i].entity_id)) {
      rows[i] = static_cast<int64_t>(*r);
    }
  }

  const Evaluator evaluator(es, defs);
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      if (rows[i] < 0) continue;  // unknown id: all null
      for (size_t j = 0; j < defs.size(); ++j) {
        fm.table.columns[j].values[i] =
            evaluator.Eval(j, static_cast<size_t>(rows[i]), fm.cutoffs[i]);
      }
    }
  };
  jobs = std::max<size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> threads;
    const size_t chunk = (n + jobs - 1) / jobs;
    for (size_t t = 0; t < jobs; ++t) {
      const size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) threads.emplace_back(work, b, e);
    }
    for (auto& th : threads) th.join();
  }
  return fm;
}

std::filesystem::path FeatureManifestPath(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".defs.json");
  return p;
}

void WriteFeatureMatrix(const std::filesystem::path& csv_path,
                        const FeatureMatrix& matrix) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + csv_path.string());
  std::vector<std::string> header = {"entity_id", "cutoff_time"};
  for (const auto& c : matrix.table.columns) header.push_back(c.name);
  WriteCsvRow(out, header);
  std::vector<std::string> fields;
  for (size_t i = 0; i < matrix.table.rows; ++i) {
    fields.clear();
    fields.push_back(matrix.entity_ids.at(i));
    fields.push_back(FormatTimestamp(matrix.cutoffs.at(i)));
    for (const auto& c : matrix.table.columns) {
      const FeatureValue& v = c.values[i];
      if (const auto* d = std::get_if<double>(&v)) {
        fields.push_back(FormatDouble(*d));
      } else if (const auto* s = std::get_if<std::string>(&v)) {
        fields.push_back(*s);
      } else {
        fields.emplace_back();
      }
    }
    WriteCsvRow(out, fields);
  }

  nlohmann::json defs = nlohmann::json::array();
  if (!matrix.defs.empty()) {
    for (const auto& d : matrix.defs) defs.push_back(d.ToJson());
  } else {
    for (const auto& c : matrix.table.columns) {
      defs.push_back({{"name", c.name},
                      {"output_type", std::string(OutputTypeName(c.type))}});
    }
  }
  std::ofstream m(FeatureManifestPath(csv_path), std::ios::binary);
  m << nlohmann::json{{"features", defs}}.dump(2) << "\n";
}

FeatureMatrix ReadFeatureMatrix(const std::filesystem::path& csv_path) {
  CsvTable t = ReadCsv(csv_path);
  if (t.header.size() < 2 || t.header[0] != "entity_id" ||
      t.header[1] != "cutoff_time") {
    throw Error(ErrorCode::kParseError,
                csv_path.string() + ": expected entity_id,cutoff_time,...");
  }
  std::map<std::string, OutputType> declared;
  const auto manifest = FeatureManifestPath(csv_path);
  if (std::filesystem::exists(manifest)) {
    std::ifstream in(manifest);
    auto j = nlohmann::json::parse(in);
    for (const auto& f : j.at("features")) {
      if (auto ty = ParseOutputType(f.value("output_type", "numeric"))) {
        declared[f.at("name").get<std::string>()] = *ty;
      }
    }
  }
  FeatureMatrix fm;
  fm.table.rows = t.rows.size();
  for (const auto& row : t.rows) {
    fm.entity_ids.push_back(row[0]);
    auto ts = ParseTimestamp(row[1]);
    if (!ts) throw Error(ErrorCode::kParseError, "bad cutoff_time " + row[1]);
    fm.cutoffs.push_back(*ts);
  }
  for (size_t j = 2; j < t.header.size(); ++j) {
    FeatureColumn col{t.header[j], OutputType::kNumeric, {}};
    auto it = declared.find(col.name);
    bool numeric = true;
    if (it != declared.end()) {
      col.type = it->second;
      numeric = col.type != OutputType::kCategorical;
    } else {
      for (const auto& row : t.rows) {
        const std::string& s = row[j];
        if (s.empty()) continue;
        double v;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
          numeric = false;
          break;
        }
      }
      col.type = numeric ? OutputType::kNumeric : OutputType::kCategorical;
    }
    col.values.reserve(t.rows.size());
    for (const auto& row : t.rows) {
      const std::string& s = row[j];
      if (s.empty()) {
        col.values.emplace_back();
      } else if (numeric) {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
          throw Error(ErrorCode::kParseError,
                      "non-numeric value '" + s + "' in " + col.name);
        }
        col.values.emplace_back(v);
      } else {
        col.values.emplace_back(s);
      }
    }
    fm.table.columns.push_back(std::move(col));
  }
  return fm;
}

}  // namespace ehrflow
