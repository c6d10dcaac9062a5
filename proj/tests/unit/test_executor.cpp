// Copyright 2026 The kbqa Authors.
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

#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {
namespace {

Value E(const char* id) { return Value::entity(id); }
Value I(const char* n) { return Value::literal(Literal::make(n, LiteralType::Integer)); }

// Five entities: two people, each with a home city; one city has a
// population.
KnowledgeBase chain_kb() {
  return KnowledgeBase::build(
      {{"t.person", ""}, {"t.city", ""}},
      {{"t.lives_in", "t.person", "t.city", std::nullopt},
       {"t.population", "t.city", "integer", std::nullopt},
       {"t.knows", "t.person", "t.person", std::nullopt}},
      {{"m.ann", "", {"t.person"}}, {"m.bob", "", {"t.person"}}, {"m.cat", "", {"t.person"}},
       {"m.paris", "", {"t.city"}}, {"m.rome", "", {"t.city"}}},
      {{"m.ann", "t.lives_in", E("m.paris")}, {"m.bob", "t.lives_in", E("m.rome")},
       {"m.paris", "t.population", I("2100")}, {"m.rome", "t.population", I("2800")},
       {"m.ann", "t.knows", E("m.bob")}, {"m.cat", "t.knows", E("m.bob")}});
}

TEST(Execute, AustenBookQuery) {
  KnowledgeBase kb = load_kb_dir(testing::fixture_dir() / "austen" / "kb3");
  auto q = parse_sparql(
      "SELECT ?x WHERE { ?x ns:book.written_work.author ns:m.austen . ?x ns:type.object.type ns:book.written_work }");
  AnswerSet expected = {E("m.emma"), E("m.pp"), E("m.ss")};
  EXPECT_EQ(execute(kb, q), expected);
  EXPECT_EQ(brute_force_execute(kb, q), expected);
}

TEST(Execute, TwoVariableChainByHand) {
  KnowledgeBase kb = chain_kb();
  auto q = parse_sparql("SELECT ?p WHERE { ?p ns:t.knows ?q . ?q ns:t.lives_in ns:m.rome }");
  EXPECT_EQ(execute(kb, q), (AnswerSet{E("m.ann"), E("m.cat")}));
  EXPECT_EQ(brute_force_execute(kb, q), (AnswerSet{E("m.ann"), E("m.cat")}));
}

TEST(Execute, FiltersCompareNumerically) {
  KnowledgeBase kb = chain_kb();
  auto q = parse_sparql("SELECT ?c WHERE { ?c ns:t.population ?n . FILTER(?n > 2500.0) }");
  EXPECT_EQ(execute(kb, q), (AnswerSet{E("m.rome")}));
  auto cross = parse_sparql("SELECT ?c WHERE { ?c ns:t.population ?n . FILTER(?n > \"2000\"^^xsd:date) }");
  EXPECT_TRUE(execute(kb, cross).empty());
}

TEST(Execute, CountOfNothingIsZero) {
  KnowledgeBase kb = chain_kb();
  auto q = parse_sparql("SELECT (COUNT(?x) AS ?n) WHERE { ?x ns:t.knows ns:m.paris }");
  EXPECT_EQ(execute(kb, q), (AnswerSet{I("0")}));
  EXPECT_EQ(brute_force_execute(kb, q), (AnswerSet{I("0")}));
}

TEST(Execute, ArgmaxReturnsAttainersViaPath) {
  KnowledgeBase kb = chain_kb();
  auto q = parse_sexpr("(ARGMAX t.person (JOIN t.lives_in t.population))");
  EXPECT_EQ(execute(kb, q), (AnswerSet{E("m.bob")}));
  auto qmin = parse_sexpr("(ARGMIN t.person (JOIN t.lives_in t.population))");
  EXPECT_EQ(execute(kb, qmin), (AnswerSet{E("m.ann")}));
  EXPECT_EQ(brute_force_execute(kb, qmin), (AnswerSet{E("m.ann")}));
}

TEST(Execute, ArgmaxTiesReturnAllAttainers) {
  KnowledgeBase kb = KnowledgeBase::build(
      {{"t.a", ""}}, {{"t.n", "t.a", "integer", std::nullopt}}, {{"m.x", "", {"t.a"}}, {"m.y", "", {"t.a"}}},
      {{"m.x", "t.n", I("5")}, {"m.y", "t.n", I("5")}});
  EXPECT_EQ(execute(kb, parse_sexpr("(ARGMAX t.a t.n)")), (AnswerSet{E("m.x"), E("m.y")}));
}

TEST(Execute, SchemaAbsentReferencesMatchNothing) {
  KnowledgeBase kb = chain_kb();
  EXPECT_TRUE(execute(kb, parse_sparql("SELECT ?x WHERE { ?x ns:t.nope ?y }")).empty());
  EXPECT_TRUE(execute(kb, parse_sparql("SELECT ?x WHERE { ?x ns:type.object.type ns:t.nope }")).empty());
  EXPECT_TRUE(execute(KnowledgeBase{}, parse_sparql("SELECT ?x WHERE { ?x ns:t.knows ?y }")).empty());
}

TEST(BruteForce, RefusesOversizedEnumeration) {
  KnowledgeBase kb = chain_kb();
  auto q = parse_sparql("SELECT ?x WHERE { ?x ns:t.knows ?y . ?y ns:t.knows ?z }");
  EXPECT_THROW(brute_force_execute(kb, q, 10), SizeLimitError);
}

TEST(ExecuteProperty, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  testing::RandomKbShape shape;
  shape.entities = 12;
  shape.facts = 30;
  for (int i = 0; i < 200; ++i) {
    KnowledgeBase kb = testing::random_kb(rng, shape);
    CanonicalQuery q = testing::random_query(rng, kb);
    EXPECT_EQ(execute(kb, q), brute_force_execute(kb, q));
  }
}

TEST(ExecuteProperty, MonotoneUnderDeletion) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 150; ++i) {
    KnowledgeBase kb = testing::random_kb(rng);
    CanonicalQuery q = testing::random_query(rng, kb);
    q.filters.clear();
    q.aggregate = {};
    DeletionPlan plan;
    for (const auto& [id, _] : kb.entities())
      if (testing::coin(rng, 0.2)) plan.entities.push_back(id);
    for (const auto& [id, _] : kb.relations())
      if (testing::coin(rng, 0.1)) plan.relations.push_back(id);
    AnswerSet before = execute(kb, q);
    for (const auto& v : execute(delete_elements(kb, plan), q)) EXPECT_TRUE(before.count(v));
  }
}

}  // namespace
}  // namespace kbqa
