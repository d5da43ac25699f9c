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

#include "ehrflow/csv.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ehrflow/error.h"

namespace ehrflow {
namespace {

TEST(CsvTest, QuotedFieldsAndLineEndings) {
  const CsvTable t = ParseCsv("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\n2,\"multi\nline\",\n");
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x, y");
  EXPECT_EQ(t.rows[0][2], "say \"hi\"");
  EXPECT_EQ(t.rows[1][1], "multi\nline");
  EXPECT_EQ(t.rows[1][2], "");
  EXPECT_EQ(t.ColumnIndex("c"), 2);
  EXPECT_EQ(t.ColumnIndex("z"), -1);
}

TEST(CsvTest, StripsByteOrderMarkAndPadsShortRows) {
  const CsvTable t = ParseCsv("\xEF\xBB\xBFid,name\n1\n");
  EXPECT_EQ(t.header[0], "id");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"1", ""}));
}

TEST(CsvTest, LongRowIsParseError) {
  try {
    ParseCsv("a,b\n1,2,3\n");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

TEST(CsvTest, UnterminatedQuoteIsParseError) {
  EXPECT_THROW(ParseCsv("a\n\"open\n"), Error);
}

TEST(CsvTest, WriteThenParseRoundTrips) {
  CsvTable t;
  t.header = {"k", "v"};
  t.rows = {{"plain", "a,b"}, {"quote\"d", "line\nbreak"}, {"", " spaced "}};
  std::ostringstream out;
  WriteCsvRow(out, t.header);
  for (const auto& r : t.rows) WriteCsvRow(out, r);
  const CsvTable back = ParseCsv(out.str());
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(CsvTest, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) / (i + 1);
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(FormatDouble(3.0), "3");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
}

}  // namespace
}  // namespace ehrflow
