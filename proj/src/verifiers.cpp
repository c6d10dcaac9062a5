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

#include "kbqa/verifiers.hpp"

#include <algorithm>
#include <cctype>

#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {

std::string_view to_string(Strength strength) { return strength == Strength::Strong ? "strong" : "weak"; }

VerifierSuite VerifierSuite::standard(bool answerable_mode) {
  using namespace verifier_id;
  VerifierSuite s;
  s.answerable_mode = answerable_mode;
  s.strong = {kSyntax, kTypes, kSchema, kCasting, kAnswerEntity, kIntermediate};
  s.weak = {kAgreement, kEmptyAnswer};
  if (answerable_mode) {
    s.weak = {kAgreement};
    s.strong.push_back(kEmptyAnswer);
  }
  return s;
}

Strength VerifierSuite::strength_of(const std::string& id) const {
  return std::find(strong.begin(), strong.end(), id) != strong.end() ? Strength::Strong : Strength::Weak;
}

std::string python_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += "'" + items[i] + "'";
  }
  return out + "]";
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

Verdict pass(const char* id, Strength strength = Strength::Strong) { return Verdict{id, strength, true, "", {}}; }

Verdict fail(const char* id, std::string feedback, Strength strength = Strength::Strong) {
  return Verdict{id, strength, false, std::move(feedback), {}};
}

std::string kb_issue(const TemplateCatalog& t, const std::string& issue) {
  return t.render("fb-kb-inconsistency", {{"issue", issue}});
}

// One class or datatype requirement placed on a query node.
struct Constraint {
  std::string source;  // relation id, or "type.object.type C"
  std::string type;    // class id or literal tag
  bool operator==(const Constraint&) const = default;
};

void add_constraint(std::vector<Constraint>& list, Constraint c) {
  if (std::find(list.begin(), list.end(), c) == list.end()) list.push_back(std::move(c));
}

}  // namespace

std::optional<bool> parse_equivalence(const std::string& reply) {
  std::string text = lower(reply);
  auto same = text.rfind("they are same");
  auto diff = text.rfind("they are different");
  if (same == std::string::npos && diff == std::string::npos) return std::nullopt;
  if (same == std::string::npos) return false;
  if (diff == std::string::npos) return true;
  return same > diff;
}

std::string clean_generation(const std::string& reply) {
  std::string text = trim(reply);
  if (text.rfind("```", 0) == 0) {
    auto nl = text.find('\n');
    text = nl == std::string::npos ? text.substr(3) : text.substr(nl + 1);
    auto fence = text.rfind("```");
    if (fence != std::string::npos) text = text.substr(0, fence);
    text = trim(text);
  }
  if (lower(text.substr(0, 7)) == "sparql:") text = trim(text.substr(7));
  return text;
}

Verdict v1_syntax(const LogicalForm& lf, const TemplateCatalog& templates) {
  using verifier_id::kSyntax;
  if (lf.nk) return fail(kSyntax, templates.render("fb-nk-nudge", {}));
  if (!lf.parsed())
    return fail(kSyntax, templates.render("fb-syntax", {{"sparql", lf.surface}, {"error", lf.parse_error.value_or("")}}));
  return pass(kSyntax);
}

Verdict v2a_type_compatibility(const LogicalForm& lf, const KnowledgeBase& kb, const TemplateCatalog& templates) {
  using verifier_id::kTypes;
  const CanonicalQuery& q = lf.query();
  std::map<std::string, std::vector<Constraint>> on_entity;
  std::map<std::string, std::vector<Constraint>> on_variable;
  std::vector<std::string> entity_order, variable_order;

  auto note = [&](const Term& t, Constraint c) {
    if (const auto* e = std::get_if<EntityRef>(&t)) {
      if (!on_entity.count(e->id)) entity_order.push_back(e->id);
      add_constraint(on_entity[e->id], std::move(c));
    } else if (const auto* v = std::get_if<Variable>(&t)) {
      if (!on_variable.count(v->name)) variable_order.push_back(v->name);
      add_constraint(on_variable[v->name], std::move(c));
    }
  };
  for (const auto& p : q.patterns) {
    if (std::holds_alternative<TypeMarker>(p.predicate)) {
      const std::string& cls = std::get<ClassRef>(p.object).id;
      if (!kb.has_class(cls)) continue;
      note(p.subject, Constraint{std::string(kTypePredicate) + " " + cls, cls});
      continue;
    }
    const RelationDef* rel = kb.find_relation(std::get<RelationRef>(p.predicate).id);
    if (!rel) continue;
    note(p.subject, Constraint{rel->id, rel->domain});
    note(p.object, Constraint{rel->id, rel->range});
  }

  auto render = [&](const std::vector<Constraint>& cs) {
    std::vector<std::string> sources, types;
    for (const auto& c : cs) {
      sources.push_back(c.source);
      types.push_back(c.type);
    }
    return std::make_pair(python_list(sources), python_list(types));
  };

  for (const auto& id : entity_order) {
    const Entity* e = kb.find_entity(id);
    if (!e) continue;
    std::vector<Constraint> violated;
    for (const auto& c : on_entity[id])
      if (!e->classes.count(c.type)) violated.push_back(c);
    if (violated.empty()) continue;
    auto [sources, types] = render(violated);
    return fail(kTypes, kb_issue(templates, templates.render("v2a-entity", {{"relations", sources}, {"types", types}})));
  }

  for (const auto& name : variable_order) {
    const auto& cs = on_variable[name];
    std::set<std::string> types;
    for (const auto& c : cs) types.insert(c.type);
    if (types.size() < 2) continue;
    bool compatible = false;
    bool any_literal = std::any_of(types.begin(), types.end(),
                                   [](const std::string& t) { return literal_type_from_tag(t).has_value(); });
    if (!any_literal) {
      // Some entity must belong to every required class.
      const std::string& first = *types.begin();
      for (const auto& id : kb.instances(first)) {
        const Entity* e = kb.find_entity(id);
        if (std::all_of(types.begin(), types.end(), [&](const std::string& t) { return e->classes.count(t) > 0; })) {
          compatible = true;
          break;
        }
      }
    }
    if (compatible) continue;
    auto [sources, type_list] = render(cs);
    return fail(kTypes, kb_issue(templates, templates.render("v2a-variable", {{"variable", "?" + name},
                                                                              {"relations", sources},
                                                                              {"types", type_list}})));
  }
  return pass(kTypes);
}

Verdict v2b_schema_presence(const LogicalForm& lf, const KnowledgeBase& kb, const TemplateCatalog& templates) {
  using verifier_id::kSchema;
  const CanonicalQuery& q = lf.query();
  std::vector<std::string> absent;
  auto note = [&](const std::string& id) {
    if (std::find(absent.begin(), absent.end(), id) == absent.end()) absent.push_back(id);
  };
  for (const auto& p : q.patterns) {
    if (const auto* r = std::get_if<RelationRef>(&p.predicate); r && !kb.has_relation(r->id)) note(r->id);
    if (const auto* c = std::get_if<ClassRef>(&p.object); c && !kb.has_class(c->id)) note(c->id);
    for (const Term* t : {&p.subject, &p.object})
      if (const auto* e = std::get_if<EntityRef>(t); e && !kb.has_entity(e->id)) note(e->id);
  }
  for (const auto& r : q.aggregate.path)
    if (!kb.has_relation(r)) note(r);
  if (absent.empty()) return pass(kSchema);
  return fail(kSchema, kb_issue(templates, templates.render("v2b-absent", {{"ids", python_list(absent)}})));
}

Verdict v2c_literal_casting(const LogicalForm& lf, const KnowledgeBase& kb, const TemplateCatalog& templates) {
  using verifier_id::kCasting;
  const CanonicalQuery& q = lf.query();
  auto mismatch = [&](const Literal& lit, const RelationDef& rel) -> std::optional<Verdict> {
    std::string expected = rel.range;
    if (rel.literal_range && *rel.literal_range == lit.type) return std::nullopt;
    std::string issue = templates.render("v2c-cast", {{"literal", lit.lexical},
                                                      {"actual", std::string(to_string(lit.type))},
                                                      {"relation", rel.id},
                                                      {"expected", expected}});
    return fail(kCasting, kb_issue(templates, issue));
  };
  for (const auto& p : q.patterns) {
    const auto* r = std::get_if<RelationRef>(&p.predicate);
    if (!r) continue;
    const RelationDef* rel = kb.find_relation(r->id);
    if (!rel) continue;
    if (const auto* lit = std::get_if<Literal>(&p.object))
      if (auto v = mismatch(*lit, *rel)) return *v;
    if (const auto* var = std::get_if<Variable>(&p.object)) {
      if (!rel->literal_range) continue;
      for (const auto& f : q.filters)
        if (f.variable == var->name)
          if (auto v = mismatch(f.value, *rel)) return *v;
    }
  }
  return pass(kCasting);
}

Verdict v3_question_lf_agreement(const LogicalForm& lf, const std::string& question, GenerationGateway& gateway,
                                 const TemplateCatalog& templates, std::vector<Exchange>* log, Strength strength) {
  using verifier_id::kAgreement;
  lf.query();
  auto ask = [&](const char* purpose, const std::string& prompt) {
    Conversation c;
    c.add(Role::User, prompt);
    std::string reply = gateway.complete(c);
    if (log) log->push_back(Exchange{purpose, prompt, reply});
    return reply;
  };
  std::string naturalized = clean_generation(ask("v3-naturalize", templates.render("v3-naturalize", {{"sparql", lf.surface}})));
  std::string back = trim(ask("v3-backtranslate", templates.render("v3-backtranslate", {{"sparql", naturalized}})));

  Verdict v{kAgreement, strength, true, "", back};
  if (back == question) return v;
  auto same = parse_equivalence(ask("v3-equivalence", templates.render("v3-equivalence", {{"answered", back}, {"asked", question}})));
  if (same.value_or(false)) return v;
  v.passed = false;
  v.feedback = templates.render("fb-qlf-disagreement", {{"answered", back}, {"asked", question}});
  return v;
}

AnswerChecks v4_answer_consistency(const LogicalForm& lf, const KnowledgeBase& kb,
                                   const std::set<std::string>& question_entities,
                                   const std::set<std::string>& mediator_classes, bool answerable_mode,
                                   const TemplateCatalog& templates) {
  using namespace verifier_id;
  AnswerChecks out;
  out.answer = execute(kb, lf.query());

  std::vector<std::string> echoed;
  for (const auto& v : out.answer) {
    if (!v.is_entity() || !question_entities.count(v.text)) continue;
    const Entity* e = kb.find_entity(v.text);
    echoed.push_back(e && !e->label.empty() ? e->label : v.text);
  }
  if (echoed.empty()) {
    out.answer_entity = pass(kAnswerEntity);
  } else {
    std::string joined;
    for (std::size_t i = 0; i < echoed.size(); ++i) joined += (i ? ", " : "") + echoed[i];
    out.answer_entity = fail(kAnswerEntity, templates.render("fb-answer-entity", {{"answer", joined}}));
  }

  bool intermediate = !out.answer.empty() && !mediator_classes.empty();
  for (const auto& v : out.answer) {
    if (!intermediate) break;
    const Entity* e = v.is_entity() ? kb.find_entity(v.text) : nullptr;
    if (!e || e->classes.empty()) {
      intermediate = false;
      break;
    }
    for (const auto& c : e->classes)
      if (!mediator_classes.count(c)) intermediate = false;
  }
  out.intermediate = intermediate ? fail(kIntermediate, templates.render("fb-intermediate-node", {}))
                                  : pass(kIntermediate);

  Strength empty_strength = answerable_mode ? Strength::Strong : Strength::Weak;
  out.empty_answer = out.answer.empty()
                         ? fail(kEmptyAnswer, templates.render("fb-empty-answer", {}), empty_strength)
                         : pass(kEmptyAnswer, empty_strength);
  return out;
}

}  // namespace kbqa
