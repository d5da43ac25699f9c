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

#include "ehrflow/assembler.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "ehrflow/entityset.h"
#include "ehrflow/error.h"
#include "ehrflow/synth.h"
#include "test_util.h"

namespace ehrflow {
namespace {

using testing::Tables;
using testing::TempDir;
using testing::TopologicalSortSucceeds;
using testing::WriteFile;

SchemaRegistry TwoResources() {
  return SchemaRegistry::FromYaml(R"(
resources:
  patient:
    primary_key: id
    variables:
      id: id
      age: numeric
  encounter:
    primary_key: id
    time_index: start
    variables:
      id: id
      patient_fk: foreign_key
      start: datetime
      class: categorical
relations:
  - encounter.patient_fk -> patient.id
)");
}

SchemaRegistry PatientCondition() {
  return SchemaRegistry::FromYaml(R"(
resources:
  patient:
    primary_key: id
    variables:
      id: id
  condition:
    primary_key: id
    variables:
      id: id
      patient_fk: foreign_key
      code: categorical
relations:
  - condition.patient_fk -> patient.id
)");
}

constexpr char kPatients[] = "id,age\np1,30\np2,41\np3,\n";
constexpr char kEncounters[] =
    "id,patient_fk,start,class\n"
    "e1,p1,2012-03-01,inpatient\n"
    "e2,p1,2012-03-04,outpatient\n"
    "e3,p2,2012-04-01,inpatient\n"
    "e4,p3,2012-05-01,\n"
    "e5,p3,2012-05-09,emergency\n";

RelationshipDecl Edge(const std::string& child, const std::string& parent,
                      const std::string& var = "fk") {
  return {child, var, parent, "id"};
}

EntitySet WithRelations(std::vector<RelationshipDecl> rels) {
  EntitySet es;
  es.relations = std::move(rels);
  return es;
}

TEST(AssemblerTest, FullyPresentData) {
  TempDir dir;
  WriteFile(dir.path() / "patient.csv", kPatients);
  WriteFile(dir.path() / "encounter.csv", kEncounters);
  WriteFile(dir.path() / "notes.txt", "ignored");
  auto es = Assemble(dir.path(), TwoResources());
  EXPECT_EQ(es.entities.size(), 2u);
  EXPECT_EQ(es.relations.size(), 1u);
  EXPECT_TRUE(es.notes.empty());
  EXPECT_EQ(es.Get("patient").row_count(), 3u);
  EXPECT_EQ(es.Get("encounter").row_count(), 5u);
  EXPECT_EQ(es.LoadedVariableCount(), 4u);
}

TEST(AssemblerTest, MissingOptionalColumnIsNoted) {
  TempDir dir;
  WriteFile(dir.path() / "patient.csv", kPatients);
  WriteFile(dir.path() / "encounter.csv",
            "id,patient_fk,start\ne1,p1,2012-03-01\ne2,p2,2012-03-02\n");
  auto es = Assemble(dir.path(), TwoResources());
  EXPECT_EQ(es.entities.size(), 2u);
  EXPECT_EQ(es.relations.size(), 1u);
  ASSERT_EQ(es.notes.size(), 1u);
  EXPECT_EQ(es.notes[0].kind, NoteKind::kMissingVariable);
  EXPECT_EQ(es.notes[0].subject, "encounter.class");
  EXPECT_EQ(es.Get("encounter").FindColumn("class"), nullptr);
}

TEST(AssemblerTest, OrphanChildKeepsEntityDropsRelation) {
  TempDir dir;
  WriteFile(dir.path() / "condition.csv",
            "id,patient_fk,code\nc1,p1,I10\nc2,p2,E11\n");
  auto es = Assemble(dir.path(), PatientCondition());
  EXPECT_EQ(es.entities.size(), 1u);
  EXPECT_TRUE(es.relations.empty());
  std::set<std::pair<NoteKind, std::string>> notes;
  for (const auto& n : es.notes) notes.emplace(n.kind, n.subject);
  const std::set<std::pair<NoteKind, std::string>> expected = {
      {NoteKind::kMissingResource, "patient"},
      {NoteKind::kBrokenLink, "condition.patient_fk -> patient.id"}};
  EXPECT_EQ(notes, expected);
}

TEST(AssemblerTest, NoRecognizedFiles) {
  TempDir dir;
  WriteFile(dir.path() / "visits.csv", "id\n1\n");
  try {
    Assemble(dir.path(), TwoResources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoRecognizedFiles);
  }
}

TEST(AssemblerTest, DuplicatePrimaryKey) {
  auto tables = Tables({{"patient", "id,age\np1,3\np1,4\n"}});
  try {
    AssembleTables(tables, TwoResources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicatePrimaryKey);
  }
}

TEST(AssemblerTest, CoercionLenientAndStrict) {
  auto tables = Tables({{"patient", "id,age\np1,thirty\np2,41\n"}});
  auto es = AssembleTables(tables, TwoResources());
  const Column* age = es.Get("patient").FindColumn("age");
  EXPECT_TRUE(IsNull(age->cells[0]));
  EXPECT_EQ(std::get<double>(age->cells[1]), 41.0);
  ASSERT_EQ(es.notes.size(), 1u);
  EXPECT_EQ(es.notes[0].kind, NoteKind::kCoercion);

  AssembleOptions strict;
  strict.strict = true;
  try {
    AssembleTables(tables, TwoResources(), strict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypeCoercionError);
  }
}

TEST(AssemblerTest, RareDanglingKeysAreNulled) {
  std::string patients = "id,age\n";
  std::string encounters = "id,patient_fk,start,class\n";
  for (int i = 0; i < 40; ++i) {
    patients += "p" + std::to_string(i) + ",1\n";
    encounters += "e" + std::to_string(i) + ",p" + std::to_string(i) +
                  ",2012-01-01,x\n";
  }
  encounters += "e99,ghost,2012-01-01,x\n";
  auto es = AssembleTables(
      Tables({{"patient", patients}, {"encounter", encounters}}), TwoResources());
  EXPECT_EQ(es.relations.size(), 1u);
  const Entity& enc = es.Get("encounter");
  EXPECT_TRUE(IsNull(enc.FindColumn("patient_fk")->cells[*enc.RowOf("e99")]));
}

TEST(AssemblerTest, CommonDanglingKeysDropRelation) {
  auto es = AssembleTables(
      Tables({{"patient", kPatients},
              {"encounter", "id,patient_fk,start,class\ne1,p1,,\ne2,zz,,\n"}}),
      TwoResources());
  EXPECT_TRUE(es.relations.empty());
  ASSERT_EQ(es.notes.size(), 1u);
  EXPECT_EQ(es.notes[0].kind, NoteKind::kBrokenLink);
}

TEST(AssemblerTest, ReferentialIntegrityOnSyntheticData) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  SynthOptions opts;
  opts.n_patients = 60;
  auto es = AssembleTables(GenerateSyntheticTables(reg, opts), reg);
  for (const auto& rel : es.relations) {
    const Entity& child = es.Get(rel.child_resource);
    const Entity& parent = es.Get(rel.parent_resource);
    for (const auto& cell : child.FindColumn(rel.child_variable)->cells) {
      if (const auto* id = std::get_if<std::string>(&cell)) {
        EXPECT_TRUE(parent.RowOf(*id)) << rel.ToString() << " " << *id;
      }
    }
  }
  EXPECT_TRUE(TopologicalSortSucceeds(es.relations));
}

TEST(AssemblerTest, AcyclicGraphUnchanged) {
  auto es = ResolveCycles(WithRelations({Edge("A", "B"), Edge("B", "C")}));
  EXPECT_EQ(es.relations.size(), 2u);
  EXPECT_TRUE(es.notes.empty());
}

TEST(AssemblerTest, ThreeCycleLosesOneEdge) {
  auto es = ResolveCycles(
      WithRelations({Edge("A", "B"), Edge("B", "C"), Edge("C", "A")}));
  EXPECT_EQ(es.relations.size(), 2u);
  EXPECT_TRUE(TopologicalSortSucceeds(es.relations));
  ASSERT_EQ(es.notes.size(), 1u);
  EXPECT_EQ(es.notes[0].kind, NoteKind::kConsolidated);
}

TEST(AssemblerTest, SelfLoopRemoved) {
  const RelationshipDecl self{"encounter", "part_of", "encounter", "id"};
  auto es = ResolveCycles(
      WithRelations({Edge("encounter", "patient", "patient"), self}));
  ASSERT_EQ(es.relations.size(), 1u);
  EXPECT_EQ(es.relations[0].parent_resource, "patient");
  EXPECT_TRUE(TopologicalSortSucceeds(es.relations));
  ASSERT_EQ(es.notes.size(), 1u);
  EXPECT_EQ(es.notes[0].subject, self.ToString());
}

TEST(AssemblerTest, FindCycleReturnsClosedWalk) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<RelationshipDecl> rels;
    for (int e = 0; e < n * 2; ++e) {
      rels.push_back(Edge("n" + std::to_string(rng() % n),
                          "n" + std::to_string(rng() % n),
                          "f" + std::to_string(e)));
    }
    auto cycle = FindCycle(rels);
    EXPECT_EQ(cycle.empty(), TopologicalSortSucceeds(rels));
    for (size_t i = 0; i < cycle.size(); ++i) {
      EXPECT_EQ(cycle[i].parent_resource,
                cycle[(i + 1) % cycle.size()].child_resource);
    }
    auto es = ResolveCycles(WithRelations(rels));
    EXPECT_TRUE(TopologicalSortSucceeds(es.relations));
    EXPECT_EQ(es.relations.size() + es.notes.size(), rels.size());
  }
}

TEST(AssemblerTest, ReferenceSchemaBreaksDeclaredCycles) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  auto es = AssembleTables(GenerateSyntheticTables(reg, SynthOptions{}), reg);
  size_t consolidated = 0;
  for (const auto& n : es.notes) {
    if (n.kind == NoteKind::kConsolidated) ++consolidated;
  }
  EXPECT_EQ(consolidated, 2u);
  EXPECT_TRUE(TopologicalSortSucceeds(es.relations));
}

TEST(AssemblerTest, MonotoneLoading) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  auto all = GenerateSyntheticTables(reg, SynthOptions{});
  std::map<std::string, CsvTable> partial;
  std::optional<EntitySet> prev;
  for (const auto& [name, table] : all) {
    partial.emplace(name, table);
    auto es = AssembleTables(partial, reg);
    if (prev) {
      for (const auto& [ename, entity] : prev->entities) {
        const Entity* now = es.Find(ename);
        ASSERT_NE(now, nullptr) << ename;
        for (const auto& col : entity.columns()) {
          EXPECT_NE(now->FindColumn(col.decl.name), nullptr);
        }
      }
    }
    prev = std::move(es);
  }
}

TEST(AssemblerTest, Deterministic) {
  TempDir dir;
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  SynthOptions opts;
  opts.n_patients = 30;
  WriteSyntheticData(dir.path(), GenerateSyntheticTables(reg, opts));
  auto a = Assemble(dir.path(), reg);
  auto b = Assemble(dir.path(), reg);
  EXPECT_EQ(a.notes, b.notes);
  EXPECT_EQ(a.relations, b.relations);
  EXPECT_EQ(a.Fingerprint(), b.Fingerprint());
  EXPECT_EQ(ManifestJson(a).dump(), ManifestJson(b).dump());
}

}  // namespace
}  // namespace ehrflow
