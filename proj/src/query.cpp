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

#include "kbqa/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "kbqa/error.hpp"

namespace kbqa {

std::string_view to_symbol(Comparator op) {
  switch (op) {
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "=";
}

std::string_view to_string(Dialect dialect) {
  return dialect == Dialect::Sparql ? "sparql" : "sexpr";
}

std::optional<Dialect> dialect_from_string(std::string_view name) {
  if (name == "sparql") return Dialect::Sparql;
  if (name == "sexpr" || name == "s-expression") return Dialect::SExpr;
  return std::nullopt;
}

CanonicalQuery parse_query(Dialect dialect, std::string_view text) {
  return dialect == Dialect::Sparql ? parse_sparql(text) : parse_sexpr(text);
}

std::string render_query(Dialect dialect, const CanonicalQuery& query) {
  return dialect == Dialect::Sparql ? render_sparql(query) : render_sexpr(query);
}

std::string term_to_string(const Term& term) {
  struct Visitor {
    std::string operator()(const Variable& v) const { return "?" + v.name; }
    std::string operator()(const EntityRef& e) const { return e.id; }
    std::string operator()(const ClassRef& c) const { return c.id; }
    std::string operator()(const RelationRef& r) const { return r.id; }
    std::string operator()(const Literal& l) const {
      return l.lexical + "^^" + std::string(to_string(l.type));
    }
    std::string operator()(const TypeMarker&) const { return std::string(kTypePredicate); }
  };
  return std::visit(Visitor{}, term);
}

// ---------------------------------------------------------------------------
// Validation and extraction

namespace {

const Variable* as_var(const Term& t) { return std::get_if<Variable>(&t); }

bool mentions_variable(const CanonicalQuery& q, const std::string& name) {
  for (const auto& p : q.patterns) {
    for (const Term* t : {&p.subject, &p.object}) {
      if (const auto* v = as_var(*t); v && v->name == name) return true;
    }
  }
  return false;
}

}  // namespace

void validate_query(const CanonicalQuery& q) {
  if (q.projection.empty()) throw SyntaxError("missing projection variable", 0);
  if (!mentions_variable(q, q.projection))
    throw SyntaxError("projection variable ?" + q.projection + " is not bound in the query body", 0);
  for (const auto& f : q.filters) {
    if (!mentions_variable(q, f.variable))
      throw SyntaxError("filter variable ?" + f.variable + " is not bound in the query body", 0);
  }
  for (const auto& p : q.patterns) {
    bool subject_ok = std::holds_alternative<Variable>(p.subject) ||
                      std::holds_alternative<EntityRef>(p.subject);
    if (!subject_ok)
      throw SyntaxError("invalid subject " + term_to_string(p.subject) + " in triple pattern", 0);
    if (std::holds_alternative<TypeMarker>(p.predicate)) {
      if (!std::holds_alternative<ClassRef>(p.object))
        throw SyntaxError("type assertion object must be a class id, found " +
                              term_to_string(p.object), 0);
    } else if (std::holds_alternative<RelationRef>(p.predicate)) {
      bool object_ok = std::holds_alternative<Variable>(p.object) ||
                       std::holds_alternative<EntityRef>(p.object) ||
                       std::holds_alternative<Literal>(p.object);
      if (!object_ok)
        throw SyntaxError("invalid object " + term_to_string(p.object) + " in triple pattern", 0);
    } else {
      throw SyntaxError("predicate must be a relation id, found " + term_to_string(p.predicate), 0);
    }
  }
  bool extremum = q.aggregate.kind == Aggregate::Kind::ArgMax ||
                  q.aggregate.kind == Aggregate::Kind::ArgMin;
  if (extremum && q.aggregate.path.empty())
    throw SyntaxError("ARGMAX/ARGMIN requires a relation path", 0);
  if (!extremum && !q.aggregate.path.empty())
    throw SyntaxError("relation path given without ARGMAX/ARGMIN", 0);
}

std::set<std::string> extract_relations(const CanonicalQuery& q) {
  std::set<std::string> out;
  for (const auto& p : q.patterns)
    if (const auto* r = std::get_if<RelationRef>(&p.predicate)) out.insert(r->id);
  out.insert(q.aggregate.path.begin(), q.aggregate.path.end());
  return out;
}

std::set<std::string> extract_entities(const CanonicalQuery& q) {
  std::set<std::string> out;
  for (const auto& p : q.patterns) {
    if (const auto* e = std::get_if<EntityRef>(&p.subject)) out.insert(e->id);
    if (const auto* e = std::get_if<EntityRef>(&p.object)) out.insert(e->id);
  }
  return out;
}

std::set<std::string> extract_classes(const CanonicalQuery& q) {
  std::set<std::string> out;
  for (const auto& p : q.patterns)
    if (const auto* c = std::get_if<ClassRef>(&p.object)) out.insert(c->id);
  return out;
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

struct VarTable {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;

  std::size_t add(const std::string& name) {
    auto [it, inserted] = index.emplace(name, names.size());
    if (inserted) names.push_back(name);
    return it->second;
  }
};

// Textual description of a term for colouring; variables render via their
// current colour so the description is independent of the variable's name.
std::string describe(const Term& t, const VarTable& vars, const std::vector<std::size_t>& color) {
  if (const auto* v = as_var(t)) return "var#" + std::to_string(color[vars.index.at(v->name)]);
  return std::to_string(t.index()) + ":" + term_to_string(t);
}

std::vector<std::size_t> rank_strings(const std::vector<std::string>& sig) {
  std::vector<std::string> sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> out(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i)
    out[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
  return out;
}

CanonicalQuery canonicalize_once(CanonicalQuery q) {
  VarTable vars;
  if (!q.projection.empty()) vars.add(q.projection);
  for (const auto& p : q.patterns)
    for (const Term* t : {&p.subject, &p.object})
      if (const auto* v = as_var(*t)) vars.add(v->name);
  for (const auto& f : q.filters) vars.add(f.variable);

  const std::size_t n = vars.names.size();
  std::vector<std::string> sig(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> fs;
    for (const auto& f : q.filters)
      if (f.variable == vars.names[i])
        fs.push_back(std::string(to_symbol(f.op)) + term_to_string(Term{f.value}));
    std::sort(fs.begin(), fs.end());
    std::string s = vars.names[i] == q.projection ? "P" : "V";
    for (const auto& f : fs) s += "|" + f;
    sig[i] = s;
  }
  std::vector<std::size_t> color = rank_strings(sig);

  // Colour refinement: a variable's colour absorbs the shapes of its incident
  // patterns. n rounds suffice for the diameter of any query graph.
  for (std::size_t round = 0; round < n; ++round) {
    std::vector<std::vector<std::string>> edges(n);
    for (const auto& p : q.patterns) {
      std::string pred = term_to_string(p.predicate);
      if (const auto* v = as_var(p.subject))
        edges[vars.index.at(v->name)].push_back("S:" + pred + ":" + describe(p.object, vars, color));
      if (const auto* v = as_var(p.object))
        edges[vars.index.at(v->name)].push_back("O:" + pred + ":" + describe(p.subject, vars, color));
    }
    std::vector<std::string> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(edges[i].begin(), edges[i].end());
      std::string s = std::to_string(color[i]);
      for (const auto& e : edges[i]) s += "|" + e;
      next[i] = std::move(s);
    }
    auto refined = rank_strings(next);
    if (refined == color) break;
    color = std::move(refined);
  }

  // Breadth-first naming from the projection; ties fall back to first
  // appearance in the input.
  std::vector<std::string> new_name(n);
  std::vector<bool> named(n, false);
  std::size_t counter = 0;
  auto name_of = [&](std::size_t i) {
    return vars.names[i] == q.projection ? std::string("x") : "v" + std::to_string(++counter);
  };
  auto bfs = [&](std::size_t root) {
    std::vector<std::size_t> queue{root};
    named[root] = true;
    new_name[root] = name_of(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::size_t u = queue[head];
      std::vector<std::pair<std::string, std::size_t>> nbrs;
      for (const auto& p : q.patterns) {
        const auto* s = as_var(p.subject);
        const auto* o = as_var(p.object);
        std::string pred = term_to_string(p.predicate);
        if (s && vars.index.at(s->name) == u && o) {
          std::size_t j = vars.index.at(o->name);
          nbrs.emplace_back("S:" + pred + ":" + std::to_string(color[j]), j);
        }
        if (o && vars.index.at(o->name) == u && s) {
          std::size_t j = vars.index.at(s->name);
          nbrs.emplace_back("O:" + pred + ":" + std::to_string(color[j]), j);
        }
      }
      std::stable_sort(nbrs.begin(), nbrs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [key, j] : nbrs) {
        if (named[j]) continue;
        named[j] = true;
        new_name[j] = name_of(j);
        queue.push_back(j);
      }
    }
  };
  if (n > 0 && !q.projection.empty()) bfs(0);
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!named[i]) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) { return color[a] < color[b]; });
  for (std::size_t i : rest)
    if (!named[i]) bfs(i);

  auto rename = [&](Term& t) {
    if (auto* v = std::get_if<Variable>(&t)) v->name = new_name[vars.index.at(v->name)];
  };
  for (auto& p : q.patterns) {
    rename(p.subject);
    rename(p.object);
  }
  for (auto& f : q.filters) f.variable = new_name[vars.index.at(f.variable)];
  if (!q.projection.empty()) q.projection = new_name[vars.index.at(q.projection)];

  std::sort(q.patterns.begin(), q.patterns.end());
  q.patterns.erase(std::unique(q.patterns.begin(), q.patterns.end()), q.patterns.end());
  std::sort(q.filters.begin(), q.filters.end());
  q.filters.erase(std::unique(q.filters.begin(), q.filters.end()), q.filters.end());
  return q;
}

}  // namespace

CanonicalQuery canonicalize(CanonicalQuery query) {
  // Answers are sets, so DISTINCT is always in effect.
  query.distinct = true;
  CanonicalQuery current = canonicalize_once(std::move(query));
  for (int i = 0; i < 4; ++i) {
    CanonicalQuery next = canonicalize_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// SPARQL rendering

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string sparql_literal(const Literal& l) {
  switch (l.type) {
    case LiteralType::Integer:
    case LiteralType::Float: return l.lexical;
    case LiteralType::String: return quote(l.lexical);
    case LiteralType::Date: return quote(l.lexical) + "^^xsd:date";
  }
  return quote(l.lexical);
}

std::string sparql_term(const Term& t) {
  struct Visitor {
    std::string operator()(const Variable& v) const { return "?" + v.name; }
    std::string operator()(const EntityRef& e) const { return "ns:" + e.id; }
    std::string operator()(const ClassRef& c) const { return "ns:" + c.id; }
    std::string operator()(const RelationRef& r) const { return "ns:" + r.id; }
    std::string operator()(const Literal& l) const { return sparql_literal(l); }
    std::string operator()(const TypeMarker&) const { return "ns:" + std::string(kTypePredicate); }
  };
  return std::visit(Visitor{}, t);
}

}  // namespace

std::string render_sparql(const CanonicalQuery& q) {
  std::ostringstream out;
  out << "SELECT ";
  switch (q.aggregate.kind) {
    case Aggregate::Kind::None:
      if (q.distinct) out << "DISTINCT ";
      out << "?" << q.projection;
      break;
    case Aggregate::Kind::Count: {
      std::string alias = q.projection == "count" ? "count_" : "count";
      out << "(COUNT(" << (q.distinct ? "DISTINCT " : "") << "?" << q.projection << ") AS ?" << alias << ")";
      break;
    }
    case Aggregate::Kind::ArgMax:
    case Aggregate::Kind::ArgMin:
      throw Error("ARGMAX/ARGMIN queries are not expressible in the SPARQL subset");
  }
  out << " WHERE { ";
  for (const auto& p : q.patterns)
    out << sparql_term(p.subject) << " " << sparql_term(p.predicate) << " " << sparql_term(p.object) << " . ";
  for (const auto& f : q.filters)
    out << "FILTER(?" << f.variable << " " << to_symbol(f.op) << " " << sparql_literal(f.value) << ") ";
  out << "}";
  return out.str();
}

// ---------------------------------------------------------------------------
// LogicalForm

LogicalForm LogicalForm::nk_sentinel() {
  LogicalForm lf;
  lf.surface = "NK";
  lf.nk = true;
  return lf;
}

LogicalForm LogicalForm::from_text(Dialect dialect, std::string text) {
  std::string_view trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed == "NK" || trimmed == "\"NK\"") {
    LogicalForm nk = nk_sentinel();
    nk.dialect = dialect;
    return nk;
  }
  LogicalForm lf;
  lf.dialect = dialect;
  lf.surface = std::move(text);
  try {
    lf.canonical = parse_query(dialect, lf.surface);
  } catch (const SyntaxError& e) {
    lf.parse_error = e.what();
    lf.parse_error_position = e.position();
  }
  return lf;
}

LogicalForm LogicalForm::from_query(Dialect dialect, const CanonicalQuery& query) {
  LogicalForm lf;
  lf.dialect = dialect;
  lf.canonical = canonicalize(query);
  lf.surface = render_query(dialect, *lf.canonical);
  return lf;
}

const CanonicalQuery& LogicalForm::query() const {
  if (nk) throw NKInputError();
  if (!canonical) throw PreconditionError("logical form did not parse: " + parse_error.value_or(""));
  return *canonical;
}

std::set<std::string> extract_relations(const LogicalForm& lf) { return extract_relations(lf.query()); }
std::set<std::string> extract_entities(const LogicalForm& lf) { return extract_entities(lf.query()); }

}  // namespace kbqa
