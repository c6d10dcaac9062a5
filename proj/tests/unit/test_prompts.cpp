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

#include <fstream>

#include "kbqa/error.hpp"
#include "kbqa/pipeline.hpp"
#include "kbqa/prompts.hpp"

namespace kbqa {
namespace {

const TemplateCatalog& T() { return TemplateCatalog::defaults(); }

TEST(Templates, CatalogHasEveryRequiredId) {
  for (const char* id : {"pun-header", "pun-nk-exemplar", "pun-question", "fb-syntax", "fb-kb-inconsistency",
                         "fb-qlf-disagreement", "fb-empty-answer", "fb-intermediate-node", "fb-answer-entity",
                         "v3-naturalize", "v3-backtranslate", "v3-equivalence", "scun-select"})
    EXPECT_TRUE(T().has(id)) << id;
}

TEST(Templates, HeaderIsVerbatim) {
  const std::string header =
      "Translate the following question to sparql for Freebase based on the candidate sparql, candidate entities, "
      "candidate relations and candidate entity types which are separated by \"|\" respectively. Please do not "
      "include any other relations, entities and entity types. Your final sparql can have three scenarios: 1. When "
      "you need to just pick from candidate sparql. 2. When you need to extend one of candidate sparql using the "
      "candidate relations and entity types. 3. When you will generate a new sparql only using the candidate "
      "entities, relations and entity types. For  entity type check please use this relation "
      "\"type.object.type\".D o not use entity names in the query. Use specified mids. If it is impossible to "
      "construct a query using the provided candidate relations or types, return \"NK\". Make sure that the original "
      "question can be regenerated only using the identified entity types, specific entities and relations.";
  EXPECT_EQ(T().render("pun-header", {}), header);
}

TEST(Templates, FeedbackStringsAreVerbatim) {
  EXPECT_EQ(T().render("fb-empty-answer", {}),
            "The generated sparql gives an empty answer when executed on freebase KG, Please generate again a "
            "different executable sparql using the same context and constraints.");
  EXPECT_EQ(T().render("fb-intermediate-node", {}),
            "The generated sparql returns an intermediate type node when executed on the freebase KG. Maybe the "
            "answer node is an adjacent node to what we currently query for. Please generate again a different "
            "executable sparql using the same context and constraints.");
  EXPECT_EQ(T().render("fb-answer-entity", {{"answer", "International System of Units"}}),
            "The logical form upon execution returns International System of Units, which is not answering the "
            "question. Please reconstruct the query using same context and constraints.");
  EXPECT_EQ(T().render("fb-qlf-disagreement", {{"answered", "Which opera productions has Gino Marinuzzi conducted?"},
                                              {"asked", "what is the name of the premiere opera production "
                                                        "conducted by gino marinuzzi?"}}),
            "The question that you answer is NOT same as what you've been asked for! You have answered the question "
            "\"Which opera productions has Gino Marinuzzi conducted?\" but you were asked to answer \"what is the "
            "name of the premiere opera production conducted by gino marinuzzi?\". Please generate again a "
            "different executable sparql using the relations, classes and entities provided earlier. DO NOT "
            "APOLOGIZE - just return the best you can try.");
  EXPECT_EQ(T().render("fb-syntax", {{"sparql", "SELECT ?x AND ?y {...}"}, {"error", "word AND not defined"}}),
            "Correct the syntax of the following sparql query. Return ONLY the corrected sparql query without any "
            "explanation\nsparql: SELECT ?x AND ?y {...}\nVirtuoso error: word AND not defined");
}

TEST(Templates, KbInconsistencyWrapsIssue) {
  std::string issue = T().render(
      "v2a-variable", {{"variable", "?x"},
                       {"relations", "['computer.computer_emulator.computer', 'type.object.type "
                                     "computer.computer_peripheral']"},
                       {"types", "['computer.computer', 'computer.computer_peripheral']"}});
  EXPECT_EQ(T().render("fb-kb-inconsistency", {{"issue", issue}}),
            "The generated sparql has a semantic issue warning:  The types of relations don't match for variable ?x "
            "in the query. The assigned relation types by ['computer.computer_emulator.computer', 'type.object.type "
            "computer.computer_peripheral'] are ['computer.computer', 'computer.computer_peripheral']. These types "
            "are mutually incompatible... Please generate again a different executable sparql using the same context "
            "and constraints. DO NOT APOLOGIZE - just return the best you can try.");
}

TEST(Templates, UnknownAndUnbound) {
  EXPECT_THROW(T().render("no-such-template", {}), UnknownTemplateError);
  try {
    T().render("fb-answer-entity", {});
    FAIL();
  } catch (const UnboundPlaceholderError& e) {
    EXPECT_EQ(e.name(), "answer");
    EXPECT_NE(std::string(e.what()).find("{answer}"), std::string::npos);
  }
}

TEST(Templates, BracesAndExtraBindings) {
  EXPECT_EQ(render_template("t", "a {{b}} {c} {not valid} {", {{"c", "C"}, {"unused", "u"}}), "a {b} C {not valid} {");
  EXPECT_EQ(T().placeholders("fb-qlf-disagreement"), (std::vector<std::string>{"answered", "asked"}));
}

TEST(Templates, RenderedOutputHasNoPlaceholderMarkers) {
  for (const auto& id : T().ids()) {
    std::map<std::string, std::string> b;
    for (const auto& p : T().placeholders(id)) b[p] = "VALUE";
    std::string out = T().render(id, b);
    for (const auto& p : T().placeholders(id)) EXPECT_EQ(out.find("{" + p + "}"), std::string::npos) << id;
  }
}

TEST(Templates, OverridesDirectoryReplacesById) {
  auto dir = std::filesystem::temp_directory_path() / "kbqa_template_override";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "fb-empty-answer.txt") << "Empty again, {name}.\n";
  TemplateCatalog c = TemplateCatalog::with_overrides(dir);
  EXPECT_EQ(c.render("fb-empty-answer", {{"name", "x"}}), "Empty again, x.");
  EXPECT_EQ(c.text("pun-header"), T().text("pun-header"));
  std::filesystem::remove_all(dir);
}

TEST(GenerationPrompt, QuestionBlockMatchesExpectedLayout) {
  RetrievalContext ctx;
  ctx.linked_entities = {{"the onion", "m.0hpsvmv"}};
  ctx.paths = {parse_sparql("SELECT ?x WHERE { ns:m.0hpsvmv ns:book.newspaper.circulation_areas ?y . ?y "
                            "ns:periodicals.newspapers ?x . ?x ns:type.object.type ns:book.newspaper }")};
  ctx.classes = {"education.school_newspaper", "book.newspaper"};
  ctx.relations = {
      {"education.school_newspaper.school",
       relation_signature({"education.school_newspaper.school", "education.school_newspaper",
                           "education.educational_institution", std::nullopt})},
      {"book.newspaper_issue.newspaper",
       relation_signature({"book.newspaper_issue.newspaper", "book.newspaper_issue", "book.newspaper", std::nullopt})}};
  std::string prompt = build_generation_prompt("which school newspaper deals with the same subject as the onion?",
                                               ctx, {}, false, T());
  const std::string question_block =
      "Question: which school newspaper deals with the same subject as the onion? \n"
      "Candidate entities:  the onion m.0hpsvmv \n"
      "Candidate paths: SELECT DISTINCT ?xWHERE {ns:m.0hpsvmv ns:book.newspaper.circulation_areas ?x0 .?x0 "
      "ns:periodicals.newspapers ?x .?x ns:type.object.type ns:book.newspaper .}\n"
      "Candidate entity types: education.school_newspaper| book.newspaper\n"
      "Candidate relations: education.school_newspaper.school (type:education.school_newspaper R "
      "type:education.educational_institution) | book.newspaper_issue.newspaper (type:book.newspaper_issue R "
      "type:book.newspaper)\n"
      "sparql:";
  EXPECT_EQ(prompt, T().text("pun-header") + "\n\n" + T().text("pun-nk-exemplar") + "\n\n" + question_block);

  std::string answerable = build_generation_prompt("q?", ctx, {}, true, T());
  EXPECT_EQ(answerable.find("NK"), std::string::npos);
}

TEST(GenerationPrompt, FewShotsPrecedeQuestion) {
  QAExample shot;
  shot.question = "who wrote emma?";
  shot.gold_lf = LogicalForm::from_text(Dialect::Sparql, "SELECT ?x WHERE { ns:m.emma ns:book.written_work.author ?x }");
  QAExample nk;
  nk.question = "what is unknowable?";
  nk.gold_lf = LogicalForm::nk_sentinel();
  std::string prompt = build_generation_prompt("q?", {}, {shot, nk}, false, T());
  auto a = prompt.find("Question: who wrote emma?\nsparql: SELECT ?x WHERE");
  auto b = prompt.find("Question: what is unknowable?\nsparql: NK");
  auto c = prompt.find("Question: q? \n");
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
}

}  // namespace
}  // namespace kbqa
