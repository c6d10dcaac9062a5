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

#include "kbqa/executor.hpp"

#include "kbqa/error.hpp"

namespace kbqa {

namespace {

int kind_rank(const Literal& l) {
  if (l.is_numeric()) return 0;
  return l.type == LiteralType::Date ? 1 : 2;
}

bool filter_holds(const Filter& f, const Value& v) {
  if (!v.is_literal()) return false;
  auto c = compare_literals(v.as_literal(), f.value);
  if (!c) return false;
  switch (f.op) {
    case Comparator::Eq: return *c == 0;
    case Comparator::Ne: return *c != 0;
    case Comparator::Lt: return *c < 0;
    case Comparator::Le: return *c <= 0;
    case Comparator::Gt: return *c > 0;
    case Comparator::Ge: return *c >= 0;
  }
  return false;
}

// The value a term currently denotes, if any.
std::optional<Value> resolve(const Term& t, const Bindings& b) {
  if (const auto* v = std::get_if<Variable>(&t)) {
    auto it = b.find(v->name);
    if (it == b.end()) return std::nullopt;
    return it->second;
  }
  if (const auto* e = std::get_if<EntityRef>(&t)) return Value::entity(e->id);
  if (const auto* l = std::get_if<Literal>(&t)) return Value::literal(*l);
  return std::nullopt;
}

// Unifies `t` with `v` under `b`; returns false on conflict.
bool unify(const Term& t, const Value& v, Bindings& b) {
  if (const auto* var = std::get_if<Variable>(&t)) {
    auto [it, inserted] = b.emplace(var->name, v);
    return inserted || it->second == v;
  }
  auto fixed = resolve(t, b);
  return fixed && *fixed == v;
}

void join(const KnowledgeBase& kb, const CanonicalQuery& q, std::size_t i, Bindings& b,
          std::vector<Bindings>& out) {
  if (i == q.patterns.size()) {
    for (const auto& f : q.filters) {
      auto it = b.find(f.variable);
      if (it == b.end() || !filter_holds(f, it->second)) return;
    }
    out.push_back(b);
    return;
  }
  const TriplePattern& p = q.patterns[i];
  auto subject = resolve(p.subject, b);
  if (std::holds_alternative<TypeMarker>(p.predicate)) {
    const std::string& cls = std::get<ClassRef>(p.object).id;
    if (subject) {
      if (!subject->is_entity()) return;
      const Entity* e = kb.find_entity(subject->text);
      if (e && e->classes.count(cls)) join(kb, q, i + 1, b, out);
      return;
    }
    for (const auto& id : kb.instances(cls)) {
      Bindings next = b;
      if (unify(p.subject, Value::entity(id), next)) join(kb, q, i + 1, next, out);
    }
    return;
  }
  const std::string& rel = std::get<RelationRef>(p.predicate).id;
  auto object = resolve(p.object, b);
  const std::vector<std::size_t>* candidates;
  if (subject) {
    if (!subject->is_entity()) return;
    candidates = &kb.by_subject(subject->text);
  } else if (object) {
    candidates = &kb.by_object(*object);
  } else {
    candidates = &kb.by_relation(rel);
  }
  for (std::size_t fi : *candidates) {
    const Fact& f = kb.facts()[fi];
    if (f.relation != rel) continue;
    Bindings next = b;
    if (unify(p.subject, Value::entity(f.subject), next) && unify(p.object, f.object, next))
      join(kb, q, i + 1, next, out);
  }
}

// Literal values reached from `start` by following `path` forward.
std::vector<Literal> path_values(const KnowledgeBase& kb, const Value& start, const std::vector<std::string>& path) {
  std::vector<Value> frontier{start};
  for (const auto& rel : path) {
    std::vector<Value> next;
    for (const auto& v : frontier) {
      if (!v.is_entity()) continue;
      for (std::size_t fi : kb.by_subject(v.text))
        if (kb.facts()[fi].relation == rel) next.push_back(kb.facts()[fi].object);
    }
    frontier = std::move(next);
  }
  std::vector<Literal> out;
  for (const auto& v : frontier)
    if (v.is_literal()) out.push_back(v.as_literal());
  return out;
}

AnswerSet aggregate(const KnowledgeBase& kb, const CanonicalQuery& q, const AnswerSet& projected) {
  switch (q.aggregate.kind) {
    case Aggregate::Kind::None: return projected;
    case Aggregate::Kind::Count:
      return AnswerSet{Value::literal(Literal::make(std::to_string(projected.size()), LiteralType::Integer))};
    case Aggregate::Kind::ArgMax:
    case Aggregate::Kind::ArgMin: break;
  }
  bool want_max = q.aggregate.kind == Aggregate::Kind::ArgMax;
  std::optional<Literal> best;
  std::vector<std::pair<Value, std::vector<Literal>>> scored;
  for (const auto& v : projected) {
    auto values = path_values(kb, v, q.aggregate.path);
    for (const auto& l : values) {
      if (!best) {
        best = l;
        continue;
      }
      auto c = extremum_order(l, *best);
      if (want_max ? c > 0 : c < 0) best = l;
    }
    scored.emplace_back(v, std::move(values));
  }
  AnswerSet out;
  if (!best) return out;
  for (const auto& [v, values] : scored)
    for (const auto& l : values)
      if (extremum_order(l, *best) == 0) out.insert(v);
  return out;
}

}  // namespace

std::strong_ordering extremum_order(const Literal& a, const Literal& b) {
  int ka = kind_rank(a), kb = kind_rank(b);
  if (ka != kb) return ka <=> kb;
  auto c = compare_literals(a, b);
  return c ? *c : std::strong_ordering::equal;
}

std::vector<Bindings> solve(const KnowledgeBase& kb, const CanonicalQuery& q) {
  std::vector<Bindings> out;
  Bindings b;
  join(kb, q, 0, b, out);
  return out;
}

AnswerSet execute(const KnowledgeBase& kb, const CanonicalQuery& q) {
  AnswerSet projected;
  for (const auto& b : solve(kb, q)) {
    auto it = b.find(q.projection);
    if (it != b.end()) projected.insert(it->second);
  }
  return aggregate(kb, q, projected);
}

// ---------------------------------------------------------------------------

namespace {

struct Oracle {
  const KnowledgeBase& kb;
  const CanonicalQuery& q;
  std::vector<Value> domain;
  std::vector<std::string> vars;
  std::map<std::string, Value> assignment;
  AnswerSet projected;

  bool term_value(const Term& t, Value& out) const {
    if (const auto* v = std::get_if<Variable>(&t)) {
      out = assignment.at(v->name);
      return true;
    }
    if (const auto* e = std::get_if<EntityRef>(&t)) {
      out = Value::entity(e->id);
      return true;
    }
    if (const auto* l = std::get_if<Literal>(&t)) {
      out = Value::literal(*l);
      return true;
    }
    return false;
  }

  bool satisfied() const {
    for (const auto& p : q.patterns) {
      Value s, o;
      if (!term_value(p.subject, s) || !s.is_entity()) return false;
      if (std::holds_alternative<TypeMarker>(p.predicate)) {
        auto classes = kb.entity_classes(s.text);
        if (!classes || !classes->count(std::get<ClassRef>(p.object).id)) return false;
        continue;
      }
      term_value(p.object, o);
      if (!kb.contains_fact(Fact{s.text, std::get<RelationRef>(p.predicate).id, o})) return false;
    }
    for (const auto& f : q.filters)
      if (!filter_holds(f, assignment.at(f.variable))) return false;
    return true;
  }

  void enumerate(std::size_t k) {
    if (k == vars.size()) {
      if (satisfied()) projected.insert(assignment.at(q.projection));
      return;
    }
    for (const auto& v : domain) {
      assignment[vars[k]] = v;
      enumerate(k + 1);
    }
  }
};

}  // namespace

AnswerSet brute_force_execute(const KnowledgeBase& kb, const CanonicalQuery& q, std::uint64_t max_assignments) {
  std::set<Value> domain;
  for (const auto& [id, e] : kb.entities()) domain.insert(Value::entity(id));
  for (const auto& f : kb.facts())
    if (f.object.is_literal()) domain.insert(f.object);
  std::set<std::string> vars;
  for (const auto& p : q.patterns) {
    for (const Term* t : {&p.subject, &p.object}) {
      if (const auto* v = std::get_if<Variable>(t)) vars.insert(v->name);
      if (const auto* l = std::get_if<Literal>(t)) domain.insert(Value::literal(*l));
    }
  }
  for (const auto& f : q.filters) domain.insert(Value::literal(f.value));

  std::uint64_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (domain.empty()) {
      total = 0;
      break;
    }
    if (total > max_assignments / domain.size()) throw SizeLimitError("brute-force enumeration exceeds the bound");
    total *= domain.size();
  }

  Oracle o{kb, q, {domain.begin(), domain.end()}, {vars.begin(), vars.end()}, {}, {}};
  if (total > 0 && vars.count(q.projection)) o.enumerate(0);

  switch (q.aggregate.kind) {
    case Aggregate::Kind::None: return o.projected;
    case Aggregate::Kind::Count:
      return {Value::literal(Literal::make(std::to_string(o.projected.size()), LiteralType::Integer))};
    case Aggregate::Kind::ArgMax:
    case Aggregate::Kind::ArgMin: break;
  }
  // Score each projected value by scanning every fact chain along the path.
  bool want_max = q.aggregate.kind == Aggregate::Kind::ArgMax;
  std::vector<std::pair<Value, Literal>> reached;
  for (const auto& start : o.projected) {
    std::vector<Value> ends{start};
    for (const auto& rel : q.aggregate.path) {
      std::vector<Value> next;
      for (const auto& e : ends)
        for (const auto& f : kb.facts())
          if (e.is_entity() && f.subject == e.text && f.relation == rel) next.push_back(f.object);
      ends = std::move(next);
    }
    for (const auto& e : ends)
      if (e.is_literal()) reached.emplace_back(start, e.as_literal());
  }
  AnswerSet out;
  for (const auto& [v, l] : reached) {
    bool extreme = true;
    for (const auto& [w, m] : reached) {
      auto c = extremum_order(m, l);
      if (want_max ? c > 0 : c < 0) extreme = false;
    }
    if (extreme) out.insert(v);
  }
  return out;
}

}  // namespace kbqa
