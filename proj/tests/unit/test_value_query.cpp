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
#include "kbqa/query.hpp"
#include "kbqa/value.hpp"

namespace kbqa {
namespace {

TEST(Literal, CanonicalLexicalForms) {
  EXPECT_EQ(Literal::make("007", LiteralType::Integer).lexical, "7");
  EXPECT_EQ(Literal::make("+3", LiteralType::Integer).lexical, "3");
  EXPECT_EQ(Literal::make("1", LiteralType::Float).lexical.find_first_of(".e") != std::string::npos, true);
  EXPECT_EQ(Literal::make("1990-05", LiteralType::Date).lexical, "1990-05");
  EXPECT_THROW(Literal::make("12ab", LiteralType::Integer), Error);
  EXPECT_THROW(Literal::make("1990-13-01", LiteralType::Date), Error);
}

TEST(Literal, ComparisonAcrossNumericKinds) {
  auto i = Literal::make("2", LiteralType::Integer);
  auto f = Literal::make("2.5", LiteralType::Float);
  ASSERT_TRUE(compare_literals(i, f).has_value());
  EXPECT_EQ(*compare_literals(i, f), std::strong_ordering::less);
  auto d1 = Literal::make("1990", LiteralType::Date);
  auto d2 = Literal::make("1990-01-01", LiteralType::Date);
  EXPECT_TRUE(compare_literals(d1, d2).has_value());
  EXPECT_FALSE(compare_literals(i, d1).has_value());
  EXPECT_FALSE(compare_literals(Literal::make("a", LiteralType::String), i).has_value());
}

TEST(Value, DisplayShowsTypeForLiterals) {
  EXPECT_EQ(to_display(Value::entity("m.x")), "m.x");
  EXPECT_EQ(to_display(Value::literal(Literal::make("3", LiteralType::Integer))), "3^^integer");
}

TEST(SparqlParser, ParsesBasicGraphPattern) {
  auto q = parse_sparql("PREFIX ns: <http://rdf.freebase.com/ns/> SELECT DISTINCT ?x WHERE { ?x ns:book.written_work.author ns:m.austen . ?x ns:type.object.type ns:book.written_work }");
  EXPECT_EQ(q.projection, "x");
  ASSERT_EQ(q.patterns.size(), 2u);
  EXPECT_EQ(extract_relations(q), (std::set<std::string>{"book.written_work.author"}));
  EXPECT_EQ(extract_entities(q), (std::set<std::string>{"m.austen"}));
  EXPECT_EQ(extract_classes(q), (std::set<std::string>{"book.written_work"}));
}

TEST(SparqlParser, VariableNamesDoNotMatter) {
  auto a = parse_sparql("SELECT ?book WHERE { ?book ns:r.a ?p . ?p ns:r.b ns:m.e }");
  auto b = parse_sparql("SELECT DISTINCT ?q WHERE { ?z ns:r.b ns:m.e . ?q ns:r.a ?z . }");
  EXPECT_EQ(a, b);
}

TEST(SparqlParser, FiltersAndLiteralTypes) {
  auto q = parse_sparql(
      "SELECT ?x WHERE { ?x ns:r.year ?y . FILTER(?y >= \"1990\"^^xsd:gYear) FILTER(2000 > ?y) }");
  ASSERT_EQ(q.filters.size(), 2u);
  for (const auto& f : q.filters) EXPECT_EQ(f.value.type == LiteralType::Date || f.value.type == LiteralType::Integer, true);
  bool flipped = false;
  for (const auto& f : q.filters) flipped = flipped || (f.op == Comparator::Lt && f.value.lexical == "2000");
  EXPECT_TRUE(flipped);
}

TEST(SparqlParser, CountAggregate) {
  auto q = parse_sparql("SELECT (COUNT(DISTINCT ?x) AS ?n) WHERE { ?x ns:r.a ns:m.e }");
  EXPECT_EQ(q.aggregate.kind, Aggregate::Kind::Count);
}

TEST(SparqlParser, ErrorsCarryPositions) {
  try {
    parse_sparql("SELECT ?x WHERE { ?x ns:r.a }");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
    EXPECT_GT(e.position(), 0u);
  }
  EXPECT_THROW(parse_sparql("SELECT ?x WHERE { ?x foo:r.a ?y }"), SyntaxError);
  EXPECT_THROW(parse_sparql("SELECT * WHERE { ?x ns:r.a ?y }"), SyntaxError);
  EXPECT_THROW(parse_sparql("SELECT ?z WHERE { ?x ns:r.a ?y }"), SyntaxError);
  EXPECT_THROW(parse_sparql(""), SyntaxError);
}

TEST(SexprParser, JoinReverseAndCompare) {
  auto q = parse_sexpr("(AND book.written_work (JOIN book.written_work.author m.austen))");
  auto s = parse_sparql("SELECT ?x WHERE { ?x ns:book.written_work.author ns:m.austen . ?x ns:type.object.type ns:book.written_work }");
  EXPECT_EQ(q, s);
  auto r = parse_sexpr("(JOIN (R people.person.places_lived) m.austen)");
  auto rs = parse_sparql("SELECT ?x WHERE { ns:m.austen ns:people.person.places_lived ?x }");
  EXPECT_EQ(r, rs);
  auto c = parse_sexpr("(AND t.film (lt t.year 1990^^date))");
  auto cs = parse_sparql("SELECT ?x WHERE { ?x ns:type.object.type ns:t.film . ?x ns:t.year ?y . FILTER(?y < \"1990\"^^xsd:date) }");
  EXPECT_EQ(c, cs);
}

TEST(SexprParser, Errors) {
  EXPECT_THROW(parse_sexpr("(JOIN r.a m.e"), SyntaxError);
  EXPECT_THROW(parse_sexpr("(FOO r.a m.e)"), SyntaxError);
  EXPECT_THROW(parse_sexpr("()"), SyntaxError);
  EXPECT_THROW(parse_sexpr("(AND t.c (COUNT t.d))"), SyntaxError);
  EXPECT_THROW(parse_sexpr("m.e"), SyntaxError);
}

TEST(SexprRender, RoundTripsThroughParser) {
  const char* cases[] = {
      "(AND book.written_work (JOIN book.written_work.author m.austen))",
      "(COUNT (JOIN (R music.recording.artist) m.r))",
      "(ARGMAX t.film (JOIN t.release t.year))",
      "(AND t.film (ge t.year 1990^^date))",
      "(JOIN r.a (JOIN r.b \"some name\"))",
  };
  for (const char* text : cases) {
    auto q = parse_sexpr(text);
    EXPECT_EQ(parse_sexpr(render_sexpr(q)), q) << text;
  }
}

TEST(SexprRender, RejectsInexpressibleQueries) {
  auto cyc = parse_sparql("SELECT ?x WHERE { ?x ns:r.a ?y . ?y ns:r.b ?x }");
  EXPECT_THROW(render_sexpr(cyc), Error);
  auto eq = parse_sparql("SELECT ?x WHERE { ?x ns:r.a ?y . FILTER(?y = 3) }");
  EXPECT_THROW(render_sexpr(eq), Error);
  auto argmax = parse_sexpr("(ARGMAX t.film t.year)");
  EXPECT_THROW(render_sparql(argmax), Error);
}

TEST(LogicalForm, NkAndUnparseableText) {
  auto nk = LogicalForm::from_text(Dialect::Sparql, "  NK \n");
  EXPECT_TRUE(nk.nk);
  EXPECT_THROW(nk.query(), NKInputError);
  auto bad = LogicalForm::from_text(Dialect::Sparql, "SELECT ?x WHERE {");
  EXPECT_FALSE(bad.parsed());
  EXPECT_TRUE(bad.parse_error.has_value());
  EXPECT_THROW(bad.query(), PreconditionError);
}

// Canonicalization is idempotent and invariant under variable renaming and
// pattern order.
TEST(CanonicalizeProperty, IdempotentAndRenamingInvariant) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    KnowledgeBase kb = testing::random_kb(rng);
    CanonicalQuery q = testing::random_query(rng, kb);
    EXPECT_EQ(canonicalize(q), q);

    CanonicalQuery renamed = q;
    auto rename = [](Term& t) {
      if (auto* v = std::get_if<Variable>(&t)) v->name = "zz_" + v->name;
    };
    for (auto& p : renamed.patterns) {
      rename(p.subject);
      rename(p.object);
    }
    for (auto& f : renamed.filters) f.variable = "zz_" + f.variable;
    renamed.projection = "zz_" + renamed.projection;
    std::reverse(renamed.patterns.begin(), renamed.patterns.end());
    EXPECT_EQ(canonicalize(renamed), q);
  }
}

TEST(RenderProperty, SparqlRoundTrip) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    KnowledgeBase kb = testing::random_kb(rng);
    CanonicalQuery q = testing::random_query(rng, kb);
    if (q.aggregate.kind == Aggregate::Kind::ArgMax || q.aggregate.kind == Aggregate::Kind::ArgMin) continue;
    EXPECT_EQ(parse_sparql(render_sparql(q)), q) << render_sparql(q);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

}  // namespace
}  // namespace kbqa
