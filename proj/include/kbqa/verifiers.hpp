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

#pragma once

// Strong and weak checks over a generated logical form. Each check yields a
// Verdict whose feedback is a rendered template when it fails.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kbqa/gateway.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/prompts.hpp"
#include "kbqa/query.hpp"

namespace kbqa {

enum class Strength { Strong, Weak };

std::string_view to_string(Strength strength);

namespace verifier_id {
inline constexpr const char* kSyntax = "V1";
inline constexpr const char* kTypes = "V2a";
inline constexpr const char* kSchema = "V2b";
inline constexpr const char* kCasting = "V2c";
inline constexpr const char* kAgreement = "V3";
inline constexpr const char* kAnswerEntity = "V4a";
inline constexpr const char* kIntermediate = "V4a-int";
inline constexpr const char* kEmptyAnswer = "V4b";
}  // namespace verifier_id

struct Verdict {
  std::string id;
  Strength strength = Strength::Strong;
  bool passed = true;
  std::string feedback;  // empty when passed
  std::optional<std::string> back_translation;

  bool operator==(const Verdict&) const = default;
};

struct VerifierSuite {
  std::vector<std::string> strong;
  std::vector<std::string> weak;
  bool answerable_mode = false;

  // Strong: V1 V2a V2b V2c V4a V4a-int; weak: V3 V4b. Answerable mode moves
  // V4b to the end of the strong list.
  static VerifierSuite standard(bool answerable_mode = false);
  Strength strength_of(const std::string& id) const;
};

Verdict v1_syntax(const LogicalForm& lf, const TemplateCatalog& templates = TemplateCatalog::defaults());

// The remaining checks expect a parsed, non-NK form and throw
// PreconditionError otherwise.
Verdict v2a_type_compatibility(const LogicalForm& lf, const KnowledgeBase& kb,
                               const TemplateCatalog& templates = TemplateCatalog::defaults());
Verdict v2b_schema_presence(const LogicalForm& lf, const KnowledgeBase& kb,
                            const TemplateCatalog& templates = TemplateCatalog::defaults());
Verdict v2c_literal_casting(const LogicalForm& lf, const KnowledgeBase& kb,
                            const TemplateCatalog& templates = TemplateCatalog::defaults());

// Three gateway stages: naturalize variable names, back-translate to a
// question, then judge equivalence with the original question. The last
// stage is skipped when the back-translation equals the question verbatim.
// A reply that states neither "same" nor "different" counts as a failure.
// Appends each exchange to `log` when given.
Verdict v3_question_lf_agreement(const LogicalForm& lf, const std::string& question, GenerationGateway& gateway,
                                 const TemplateCatalog& templates = TemplateCatalog::defaults(),
                                 std::vector<Exchange>* log = nullptr, Strength strength = Strength::Weak);

struct AnswerChecks {
  Verdict answer_entity;  // V4a
  Verdict intermediate;   // V4a-int
  Verdict empty_answer;   // V4b
  AnswerSet answer;
};

AnswerChecks v4_answer_consistency(const LogicalForm& lf, const KnowledgeBase& kb,
                                   const std::set<std::string>& question_entities,
                                   const std::set<std::string>& mediator_classes = {},
                                   bool answerable_mode = false,
                                   const TemplateCatalog& templates = TemplateCatalog::defaults());

// Renders ['a', 'b'].
std::string python_list(const std::vector<std::string>& items);

// Parses the verdict of an equivalence reply: true for "same", false for
// "different", nullopt when neither appears. The last statement wins.
std::optional<bool> parse_equivalence(const std::string& reply);

// Strips code fences and a leading "sparql:" label from a model reply.
std::string clean_generation(const std::string& reply);

}  // namespace kbqa
