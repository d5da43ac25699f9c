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

#include "ehrflow/schema.h"

#include <gtest/gtest.h>

#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "ehrflow/error.h"
#include "test_util.h"

namespace ehrflow {
namespace {

constexpr char kTwoResources[] = R"(
resources:
  patient:
    primary_key: id
    variables:
      id: id
  encounter:
    primary_key: id
    variables:
      id: id
      patient_fk: foreign_key
      class: categorical
relations:
  - encounter.patient_fk -> patient.id
)";

ErrorCode CodeOf(const std::string& yaml) {
  try {
    SchemaRegistry::FromYaml(yaml);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

// Relations in the bundled file, counted from its text rather than the parser.
std::vector<std::string> RelationLinesOf(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  bool in_relations = false;
  const std::regex item(R"(^\s*-\s*(\S+\.\S+\s*->\s*\S+\.\S+)\s*$)");
  while (std::getline(in, line)) {
    if (line.rfind("relations:", 0) == 0) {
      in_relations = true;
      continue;
    }
    if (!line.empty() && line[0] != ' ' && line[0] != '#') in_relations = false;
    std::smatch m;
    if (in_relations && std::regex_match(line, m, item)) out.push_back(m[1]);
  }
  return out;
}

TEST(SchemaTest, MinimalSchemaLoads) {
  auto reg = SchemaRegistry::FromYaml(kTwoResources);
  EXPECT_EQ(reg.resources().size(), 2u);
  ASSERT_EQ(reg.relations().size(), 1u);
  EXPECT_EQ(reg.relations()[0].ToString(), "encounter.patient_fk -> patient.id");
  EXPECT_EQ(reg.FindResource("encounter")->primary_key, "id");
  EXPECT_EQ(reg.FindResource("visit"), nullptr);
}

TEST(SchemaTest, UndeclaredResourceIsDangling) {
  std::string text = kTwoResources;
  text += "  - encounter.patient_fk -> visit.id\n";
  EXPECT_EQ(CodeOf(text), ErrorCode::kDanglingReference);
}

TEST(SchemaTest, UndeclaredVariableIsDangling) {
  std::string text = kTwoResources;
  text += "  - encounter.nope -> patient.id\n";
  EXPECT_EQ(CodeOf(text), ErrorCode::kDanglingReference);
}

TEST(SchemaTest, MalformedInputIsParseError) {
  EXPECT_EQ(CodeOf("resources: [unclosed"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("other: 1\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("resources:\n  a:\n    primary_key: id\n    variables:\n"
                   "      id: quaternion\n"),
            ErrorCode::kParseError);
}

TEST(SchemaTest, RelationsForChildOnly) {
  auto reg = SchemaRegistry::FromYaml(kTwoResources);
  auto enc = reg.RelationsFor("encounter");
  ASSERT_EQ(enc.size(), 1u);
  EXPECT_EQ(enc[0].parent_resource, "patient");
  EXPECT_TRUE(reg.RelationsFor("patient").empty());
  try {
    reg.RelationsFor("visit");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownResource);
  }
}

TEST(SchemaTest, ReferenceSchemaMatchesFile) {
  const auto path = testing::DataDir() / "schemas" / "reference.yaml";
  auto reg = LoadSchema(path);
  const std::set<std::string> expected_names = {
      "patient",   "encounter", "condition",       "appointment",
      "observation", "procedure", "diagnosis",     "period",
      "coding",    "reference_range", "medication", "practitioner"};
  std::set<std::string> names;
  for (const auto& [name, res] : reg.resources()) names.insert(name);
  EXPECT_EQ(names, expected_names);

  const auto lines = RelationLinesOf(testing::ReadFile(path));
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(reg.relations().size(), lines.size());

  std::set<std::string> condition_lines;
  for (const auto& l : lines) {
    if (l.rfind("condition.", 0) == 0) condition_lines.insert(l);
  }
  std::set<std::string> condition_rels;
  for (const auto& r : reg.RelationsFor("condition")) {
    condition_rels.insert(r.ToString());
  }
  EXPECT_EQ(condition_rels, condition_lines);
}

TEST(SchemaTest, RelationsForPartitionsRelations) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  std::multiset<RelationshipDecl> seen;
  for (const auto& [name, res] : reg.resources()) {
    for (const auto& r : reg.RelationsFor(name)) seen.insert(r);
  }
  std::multiset<RelationshipDecl> all(reg.relations().begin(),
                                      reg.relations().end());
  EXPECT_EQ(seen, all);
  for (const auto& r : all) EXPECT_EQ(all.count(r), 1u);
}

TEST(SchemaTest, YamlRoundTrip) {
  for (const char* file : {"reference.yaml", "noshow.yaml"}) {
    auto reg = LoadSchema(testing::DataDir() / "schemas" / file);
    auto again = SchemaRegistry::FromYaml(reg.ToYaml());
    EXPECT_EQ(reg, again) << file;
    EXPECT_EQ(again.ToYaml(), reg.ToYaml()) << file;
  }
}

TEST(SchemaTest, LoadIsDeterministic) {
  const auto path = testing::DataDir() / "schemas" / "reference.yaml";
  EXPECT_EQ(LoadSchema(path), LoadSchema(path));
}

TEST(SchemaTest, RequiredVariablesAreNotNullable) {
  auto reg = LoadSchema(testing::DataDir() / "schemas" / "reference.yaml");
  const auto* appt = reg.FindResource("appointment");
  ASSERT_NE(appt, nullptr);
  EXPECT_FALSE(appt->FindVariable("created")->nullable);
  EXPECT_TRUE(appt->FindVariable("status")->nullable);
  EXPECT_EQ(appt->time_index, "created");
}

TEST(SchemaTest, ParseRelationship) {
  auto r = ParseRelationship(" a.b  ->  c.d ");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->child_resource, "a");
  EXPECT_EQ(r->parent_variable, "d");
  EXPECT_FALSE(ParseRelationship("a.b c.d"));
  EXPECT_FALSE(ParseRelationship("ab -> c.d"));
}

}  // namespace
}  // namespace ehrflow
