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

#include <cctype>
#include <map>
#include <memory>
#include <regex>

#include "kbqa/error.hpp"
#include "kbqa/query.hpp"

namespace kbqa {
namespace {

struct Node {
  bool is_list = false;
  std::string atom;
  bool quoted = false;
  std::vector<Node> items;
  std::size_t pos = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  Node read_all() {
    skip();
    if (i_ >= src_.size()) throw SyntaxError("empty s-expression", 0);
    Node n = read();
    skip();
    if (i_ < src_.size()) {
      if (src_[i_] == ')') throw SyntaxError("unbalanced parentheses: unexpected ')'", i_);
      throw SyntaxError("unexpected trailing input", i_);
    }
    return n;
  }

 private:
  void skip() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }

  Node read() {
    skip();
    if (i_ >= src_.size()) throw SyntaxError("unbalanced parentheses: missing ')'", i_);
    Node n;
    n.pos = i_;
    char c = src_[i_];
    if (c == '(') {
      ++i_;
      n.is_list = true;
      for (;;) {
        skip();
        if (i_ >= src_.size()) throw SyntaxError("unbalanced parentheses: missing ')'", i_);
        if (src_[i_] == ')') {
          ++i_;
          break;
        }
        n.items.push_back(read());
      }
      if (n.items.empty()) throw SyntaxError("empty list", n.pos);
      return n;
    }
    if (c == ')') throw SyntaxError("unbalanced parentheses: unexpected ')'", i_);
    if (c == '"') {
      ++i_;
      while (i_ < src_.size() && src_[i_] != '"') {
        if (src_[i_] == '\\' && i_ + 1 < src_.size()) ++i_;
        n.atom += src_[i_++];
      }
      if (i_ >= src_.size()) throw SyntaxError("unterminated string literal", n.pos);
      ++i_;
      n.quoted = true;
      // "value"^^type keeps the type suffix on the atom.
      if (src_.substr(i_, 2) == "^^") {
        std::size_t b = i_;
        while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_])) && src_[i_] != '(' &&
               src_[i_] != ')')
          ++i_;
        n.atom += std::string(src_.substr(b, i_ - b));
        n.quoted = false;
      }
      return n;
    }
    while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_])) && src_[i_] != '(' &&
           src_[i_] != ')')
      n.atom += src_[i_++];
    return n;
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

const std::regex& entity_pattern() {
  static const std::regex re("^[mg]\\.[A-Za-z0-9_]+$");
  return re;
}

std::optional<LiteralType> datatype_name(std::string_view name) {
  auto cut = name.find_last_of("#:/");
  if (cut != std::string_view::npos) name = name.substr(cut + 1);
  if (auto t = literal_type_from_tag(name)) return t;
  if (name == "int" || name == "long") return LiteralType::Integer;
  if (name == "double" || name == "decimal") return LiteralType::Float;
  if (name == "dateTime" || name == "gYear" || name == "gYearMonth") return LiteralType::Date;
  return std::nullopt;
}

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

enum class AtomKind { Entity, Class, Literal };

struct Classified {
  AtomKind kind;
  std::string id;
  Literal literal;
};

Classified classify(const Node& n) {
  try {
    if (n.quoted) return {AtomKind::Literal, "", Literal::make(n.atom, LiteralType::String)};
    if (auto hat = n.atom.find("^^"); hat != std::string::npos) {
      auto type = datatype_name(std::string_view(n.atom).substr(hat + 2));
      if (!type) throw SyntaxError("unsupported datatype in " + n.atom, n.pos);
      std::string body = n.atom.substr(0, hat);
      if (*type == LiteralType::Date && body.size() > 10 && body[10] == 'T') body = body.substr(0, 10);
      return {AtomKind::Literal, "", Literal::make(body, *type)};
    }
    if (looks_numeric(n.atom)) {
      bool is_float = n.atom.find_first_of(".eE") != std::string::npos;
      return {AtomKind::Literal, "", Literal::make(n.atom, is_float ? LiteralType::Float : LiteralType::Integer)};
    }
  } catch (const SyntaxError&) {
    throw;
  } catch (const Error& e) {
    throw SyntaxError(e.what(), n.pos);
  }
  if (std::regex_match(n.atom, entity_pattern())) return {AtomKind::Entity, n.atom, {}};
  if (n.atom.find('.') != std::string::npos) return {AtomKind::Class, n.atom, {}};
  throw SyntaxError("unrecognized atom " + n.atom, n.pos);
}

std::string head_of(const Node& n) {
  std::string h;
  for (char c : n.items.front().atom) h += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return h;
}

class Lowering {
 public:
  CanonicalQuery run(const Node& root) {
    CanonicalQuery q;
    if (root.is_list) {
      std::string h = head_of(root);
      if (h == "COUNT") {
        arity(root, 2);
        q.projection = value_var(root.items[1]);
        q.aggregate.kind = Aggregate::Kind::Count;
      } else if (h == "ARGMAX" || h == "ARGMIN") {
        arity(root, 3);
        q.projection = value_var(root.items[1]);
        q.aggregate.kind = h == "ARGMAX" ? Aggregate::Kind::ArgMax : Aggregate::Kind::ArgMin;
        relation_path(root.items[2], q.aggregate.path);
      } else {
        q.projection = value_var(root);
      }
    } else {
      q.projection = value_var(root);
    }
    q.patterns = std::move(patterns_);
    q.filters = std::move(filters_);
    q.distinct = true;
    validate_query(q);
    return canonicalize(std::move(q));
  }

 private:
  static void arity(const Node& n, std::size_t count) {
    if (n.items.size() != count)
      throw SyntaxError(n.items.front().atom + " expects " + std::to_string(count - 1) + " argument(s)", n.pos);
  }

  std::string fresh() { return "s" + std::to_string(++counter_); }

  static std::string relation_atom(const Node& n) {
    if (n.is_list || n.quoted || n.atom.empty()) throw SyntaxError("expected a relation id", n.pos);
    return n.atom;
  }

  void relation_path(const Node& n, std::vector<std::string>& out) {
    if (!n.is_list) {
      out.push_back(relation_atom(n));
      return;
    }
    if (head_of(n) != "JOIN") throw SyntaxError("expected a relation or (JOIN r1 r2) path", n.pos);
    arity(n, 3);
    relation_path(n.items[1], out);
    relation_path(n.items[2], out);
  }

  // Lowers a node to a term standing for its denotation: a constant for
  // entity and literal atoms, otherwise a fresh variable.
  Term value(const Node& n) {
    if (!n.is_list) {
      Classified c = classify(n);
      if (c.kind == AtomKind::Entity) return EntityRef{c.id};
      if (c.kind == AtomKind::Literal) return c.literal;
    }
    std::string v = fresh();
    constrain(n, v);
    return Variable{v};
  }

  std::string value_var(const Node& n) {
    Term t = value(n);
    if (const auto* v = std::get_if<Variable>(&t)) return v->name;
    throw SyntaxError("a constant cannot be the answer of an s-expression", n.pos);
  }

  // Emits patterns restricting variable `v` to the set denoted by `n`.
  void constrain(const Node& n, const std::string& v) {
    if (!n.is_list) {
      Classified c = classify(n);
      if (c.kind != AtomKind::Class) throw SyntaxError("constant " + n.atom + " cannot be intersected", n.pos);
      patterns_.push_back(TriplePattern{Variable{v}, TypeMarker{}, ClassRef{c.id}});
      return;
    }
    if (n.items.front().is_list) throw SyntaxError("expected a function name", n.pos);
    std::string h = head_of(n);
    if (h == "AND") {
      if (n.items.size() < 3) throw SyntaxError("AND expects at least 2 arguments", n.pos);
      for (std::size_t i = 1; i < n.items.size(); ++i) constrain(n.items[i], v);
    } else if (h == "JOIN") {
      arity(n, 3);
      const Node& rel = n.items[1];
      bool inverse = false;
      std::string r;
      if (rel.is_list) {
        if (head_of(rel) != "R") throw SyntaxError("expected a relation or (R relation)", rel.pos);
        arity(rel, 2);
        r = relation_atom(rel.items[1]);
        inverse = true;
      } else {
        r = relation_atom(rel);
      }
      Term other = value(n.items[2]);
      if (inverse) patterns_.push_back(TriplePattern{other, RelationRef{r}, Variable{v}});
      else patterns_.push_back(TriplePattern{Variable{v}, RelationRef{r}, other});
    } else if (h == "LT" || h == "LE" || h == "GT" || h == "GE") {
      arity(n, 3);
      std::string r = relation_atom(n.items[1]);
      if (n.items[2].is_list) throw SyntaxError(h + " expects a literal bound", n.items[2].pos);
      Classified c = classify(n.items[2]);
      if (c.kind != AtomKind::Literal) throw SyntaxError(h + " expects a literal bound", n.items[2].pos);
      std::string w = fresh();
      patterns_.push_back(TriplePattern{Variable{v}, RelationRef{r}, Variable{w}});
      Comparator op = h == "LT" ? Comparator::Lt : h == "LE" ? Comparator::Le : h == "GT" ? Comparator::Gt
                                                                                        : Comparator::Ge;
      filters_.push_back(Filter{w, op, c.literal});
    } else if (h == "COUNT" || h == "ARGMAX" || h == "ARGMIN") {
      throw SyntaxError(h + " is only supported at the top level", n.pos);
    } else if (h == "R") {
      throw SyntaxError("R is only valid as the relation of a JOIN", n.pos);
    } else {
      throw SyntaxError("unknown function " + n.items.front().atom, n.pos);
    }
  }

  std::vector<TriplePattern> patterns_;
  std::vector<Filter> filters_;
  int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

std::string sexpr_literal(const Literal& l) {
  switch (l.type) {
    case LiteralType::Integer:
    case LiteralType::Float: return l.lexical;
    case LiteralType::Date: return l.lexical + "^^date";
    case LiteralType::String: {
      std::string out = "\"";
      for (char c : l.lexical) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
  }
  return l.lexical;
}

class Renderer {
 public:
  explicit Renderer(const CanonicalQuery& q) : q_(q), used_(q.patterns.size(), false) {
    for (const auto& f : q.filters) filters_by_var_[f.variable].push_back(&f);
  }

  std::string run() {
    std::set<std::string> visiting;
    std::string body = expr(q_.projection, std::nullopt, visiting);
    for (bool u : used_)
      if (!u) throw Error("query is not a tree rooted at the projection; s-expressions cannot express it");
    for (const auto& [var, fs] : filters_by_var_)
      if (!consumed_filters_.count(var)) throw Error("filter on ?" + var + " is not expressible as an s-expression");
    switch (q_.aggregate.kind) {
      case Aggregate::Kind::None: return body;
      case Aggregate::Kind::Count: return "(COUNT " + body + ")";
      case Aggregate::Kind::ArgMax:
      case Aggregate::Kind::ArgMin: {
        std::string head = q_.aggregate.kind == Aggregate::Kind::ArgMax ? "ARGMAX" : "ARGMIN";
        return "(" + head + " " + body + " " + path_expr(0) + ")";
      }
    }
    return body;
  }

 private:
  std::string path_expr(std::size_t i) const {
    const auto& path = q_.aggregate.path;
    if (i + 1 == path.size()) return path[i];
    return "(JOIN " + path[i] + " " + path_expr(i + 1) + ")";
  }

  static const std::string* var_name(const Term& t) {
    const auto* v = std::get_if<Variable>(&t);
    return v ? &v->name : nullptr;
  }

  std::size_t occurrences(const std::string& var) const {
    std::size_t n = 0;
    for (const auto& p : q_.patterns) {
      if (const auto* s = var_name(p.subject); s && *s == var) ++n;
      if (const auto* o = var_name(p.object); o && *o == var) ++n;
    }
    return n;
  }

  // A variable used once, as the object of `pattern`, with exactly one
  // ordering filter collapses into an (lt r value) form.
  std::optional<std::string> comparison_leaf(const TriplePattern& p, const std::string& w) {
    auto it = filters_by_var_.find(w);
    if (it == filters_by_var_.end() || it->second.size() != 1 || occurrences(w) != 1) return std::nullopt;
    const Filter& f = *it->second.front();
    const char* op = nullptr;
    switch (f.op) {
      case Comparator::Lt: op = "lt"; break;
      case Comparator::Le: op = "le"; break;
      case Comparator::Gt: op = "gt"; break;
      case Comparator::Ge: op = "ge"; break;
      default: return std::nullopt;
    }
    consumed_filters_.insert(w);
    return "(" + std::string(op) + " " + std::get<RelationRef>(p.predicate).id + " " + sexpr_literal(f.value) + ")";
  }

  std::string constant(const Term& t) const {
    if (const auto* e = std::get_if<EntityRef>(&t)) return e->id;
    if (const auto* l = std::get_if<Literal>(&t)) return sexpr_literal(*l);
    throw Error("unexpected term " + term_to_string(t));
  }

  std::string expr(const std::string& var, std::optional<std::size_t> via, std::set<std::string>& visiting) {
    if (!visiting.insert(var).second) throw Error("query graph has a cycle; s-expressions cannot express it");
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < q_.patterns.size(); ++i) {
      if (via && *via == i) continue;
      const auto& p = q_.patterns[i];
      const auto* s = var_name(p.subject);
      if (s && *s == var && std::holds_alternative<TypeMarker>(p.predicate)) {
        used_[i] = true;
        parts.push_back(std::get<ClassRef>(p.object).id);
      }
    }
    for (std::size_t i = 0; i < q_.patterns.size(); ++i) {
      if (via && *via == i) continue;
      const auto& p = q_.patterns[i];
      if (std::holds_alternative<TypeMarker>(p.predicate)) continue;
      const auto* s = var_name(p.subject);
      const auto* o = var_name(p.object);
      const std::string& rel = std::get<RelationRef>(p.predicate).id;
      if (s && *s == var) {
        if (used_[i]) throw Error("query graph has a cycle; s-expressions cannot express it");
        used_[i] = true;
        if (o && *o == var) throw Error("self-loop patterns are not expressible as s-expressions");
        if (o) {
          if (auto leaf = comparison_leaf(p, *o)) {
            parts.push_back(*leaf);
            continue;
          }
          parts.push_back("(JOIN " + rel + " " + expr(*o, i, visiting) + ")");
        } else {
          parts.push_back("(JOIN " + rel + " " + constant(p.object) + ")");
        }
      } else if (o && *o == var) {
        if (used_[i]) throw Error("query graph has a cycle; s-expressions cannot express it");
        used_[i] = true;
        if (s) parts.push_back("(JOIN (R " + rel + ") " + expr(*s, i, visiting) + ")");
        else parts.push_back("(JOIN (R " + rel + ") " + constant(p.subject) + ")");
      }
    }
    if (parts.empty()) throw Error("variable ?" + var + " is unconstrained; s-expressions cannot express it");
    std::string out = parts.back();
    for (std::size_t k = parts.size() - 1; k-- > 0;) out = "(AND " + parts[k] + " " + out + ")";
    return out;
  }

  const CanonicalQuery& q_;
  std::vector<bool> used_;
  std::map<std::string, std::vector<const Filter*>> filters_by_var_;
  std::set<std::string> consumed_filters_;
};

}  // namespace

CanonicalQuery parse_sexpr(std::string_view text) {
  Node root = Reader(text).read_all();
  return Lowering().run(root);
}

std::string render_sexpr(const CanonicalQuery& query) { return Renderer(query).run(); }

}  // namespace kbqa
