// Copyright 2026 The Lawforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "lawforge/law.hpp"
#include "lawforge/stl.hpp"
#include "support/oracles.hpp"

namespace lawforge::stl {
namespace {

constexpr const char* kRightTurnOnRed = R"(
G {
  (traffic_light_ahead.color = red or traffic_light_ahead.direction.color = red)
  and direction = right
  and not priority_npc_ahead
  and not priority_peds_ahead
  and (stopline_ahead(length) or junction_ahead(length))
} implies F[0, length] (real_speed > speed)
)";

TEST(StlParserTest, AlwaysOverAtom) {
  auto f = parse_formula("G (speed > 5.0)");
  ASSERT_EQ(f.kind(), NodeKind::kAlways);
  EXPECT_FALSE(f.window().has_value());
  const auto& body = f.children()[0];
  ASSERT_EQ(body.kind(), NodeKind::kAtom);
  EXPECT_EQ(body.atom(), (Atom{"speed", Comparator::kGt, 5.0}));
}

TEST(StlParserTest, RightTurnOnRedStructure) {
  auto f = parse_formula(kRightTurnOnRed);
  ASSERT_EQ(f.kind(), NodeKind::kImplies);
  const auto& ante = f.children()[0];
  const auto& cons = f.children()[1];
  ASSERT_EQ(ante.kind(), NodeKind::kAlways);
  ASSERT_EQ(ante.children()[0].kind(), NodeKind::kAnd);
  EXPECT_EQ(ante.children()[0].children().size(), 5u);
  ASSERT_EQ(cons.kind(), NodeKind::kEventually);
  ASSERT_TRUE(cons.window().has_value());
  EXPECT_EQ(cons.window()->lower, 0.0);
  EXPECT_EQ(std::get<Budget>(cons.window()->upper).name, "length");
  EXPECT_EQ(cons.children()[0].atom(),
            (Atom{"real_speed", Comparator::kGt, SignalRef{"speed"}}));
}

TEST(StlParserTest, ReferencedSignalsOfRightTurnOnRed) {
  std::set<std::string> expected{"traffic_light_ahead.color",
                                 "traffic_light_ahead.direction.color",
                                 "direction",
                                 "priority_npc_ahead",
                                 "priority_peds_ahead",
                                 "stopline_ahead",
                                 "junction_ahead",
                                 "real_speed",
                                 "speed"};
  auto f = parse_formula(kRightTurnOnRed);
  EXPECT_EQ(referenced_signals(f), expected);
  EXPECT_EQ(budget_signals(f), std::set<std::string>{"length"});
}

TEST(StlParserTest, ReferencedSignalsSimpleCases) {
  EXPECT_EQ(referenced_signals(parse_formula("speed > 5")), std::set<std::string>{"speed"});
  EXPECT_TRUE(referenced_signals(parse_formula("G (true and not false)")).empty());
}

TEST(StlParserTest, DanglingComparator) {
  try {
    parse_formula("G (speed >");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 10u);
    EXPECT_NE(std::string(e.what()).find("dangling comparator"), std::string::npos);
  }
}

TEST(StlParserTest, UnknownComparator) {
  try {
    parse_formula("speed => 3");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown comparator"), std::string::npos);
  }
  EXPECT_THROW(parse_formula("speed <> 3"), ParseError);
}

TEST(StlParserTest, MalformedWindows) {
  EXPECT_THROW(parse_formula("F[2, 1] (x > 0)"), ParseError);
  EXPECT_THROW(parse_formula("F[-1, 1] (x > 0)"), ParseError);
  EXPECT_THROW(parse_formula("F[0 1] (x > 0)"), ParseError);
  EXPECT_THROW(parse_formula("F[0, 1 (x > 0)"), ParseError);
  EXPECT_THROW(parse_formula("F[length, 2] (x > 0)"), ParseError);
}

TEST(StlParserTest, ErrorPositionsSpanLines) {
  try {
    parse_formula("G (\n  speed > 1 and\n  )");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(StlParserTest, PrecedenceAndAssociativity) {
  auto f = parse_formula("a > 1 or b > 1 and c > 1 implies d > 1 implies e > 1");
  ASSERT_EQ(f.kind(), NodeKind::kImplies);
  EXPECT_EQ(f.children()[0].kind(), NodeKind::kOr);
  EXPECT_EQ(f.children()[0].children()[1].kind(), NodeKind::kAnd);
  EXPECT_EQ(f.children()[1].kind(), NodeKind::kImplies);
  // Temporal operators bind tighter than connectives.
  auto g = parse_formula("G x > 1 and y > 2");
  EXPECT_EQ(g.kind(), NodeKind::kAnd);
}

TEST(StlParserTest, LiteralsAndSignals) {
  auto eq = parse_formula("color = red");
  EXPECT_EQ(eq.atom().rhs, Operand(Symbol{"red"}));
  auto cmp = parse_formula("real_speed >= speed");
  EXPECT_EQ(cmp.atom().rhs, Operand(SignalRef{"speed"}));
  auto flag = parse_formula("collision");
  EXPECT_EQ(flag.atom(), (Atom{"collision", Comparator::kEq, Symbol{"true"}}));
  auto neg = parse_formula("x > -1.5e-1");
  EXPECT_EQ(std::get<double>(neg.atom().rhs), -0.15);
  EXPECT_THROW(parse_formula("x > true"), ParseError);
}

TEST(StlParserTest, PrintParseFixpointOnExamples) {
  for (const char* text : {"G (speed > 5.0)", kRightTurnOnRed, "not not (x < 3)",
                           "(a > 1 and b > 2) and c > 3", "a > 1 implies (b > 1 implies c > 1)",
                           "(a > 1 implies b > 1) implies c > 1", "F[0.5, 2] G[0, 1e-3] x != 2",
                           "stopline_ahead(12.5) or true"}) {
    auto f = parse_formula(text);
    auto again = parse_formula(to_string(f));
    EXPECT_EQ(f, again) << text << "\n  printed: " << to_string(f);
    EXPECT_EQ(to_string(again), to_string(f));
  }
}

TEST(StlParserTest, PrintParseFixpointRandomized) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    auto f = testing::random_formula(rng, 5);
    auto printed = to_string(f);
    auto reparsed = parse_formula(printed);
    ASSERT_EQ(reparsed, f) << printed;
    ASSERT_EQ(parse_formula(to_string(reparsed)), reparsed);
  }
}

TEST(LawCorpusTest, ParsesDocumentAndRejectsDuplicates) {
  auto corpus = parse_corpus(R"json({"schema_version": 1, "laws": [
      {"id": "law38_3", "article": "Article 38, Item 3", "description": "right on red",
       "formula": "G (real_speed > 0)", "penalty_points": 0, "roads": ["S1", "S3"]},
      {"id": "law45", "article": "Article 45", "description": "speed",
       "formula": "G (real_speed <= 13.9)"}]})json");
  EXPECT_EQ(corpus.size(), 2u);
  EXPECT_TRUE(corpus.at("law38_3").applies_to("S1"));
  EXPECT_FALSE(corpus.at("law38_3").applies_to("S2"));
  EXPECT_TRUE(corpus.at("law45").applies_to("S2"));
  EXPECT_THROW(parse_corpus(R"json({"schema_version": 1, "laws": [
      {"id": "a", "article": "", "description": "", "formula": "x > 1"},
      {"id": "a", "article": "", "description": "", "formula": "x > 2"}]})json"),
               InputError);
  try {
    parse_corpus(R"json({"schema_version": 1, "laws": [
        {"id": "a", "article": "", "description": "", "formula": "x >"}]})json");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "/laws/0/formula");
  }
}

}  // namespace
}  // namespace lawforge::stl
