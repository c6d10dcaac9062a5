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

// Canonical query AST shared by the SPARQL subset and the s-expression
// dialect, plus the LogicalForm wrapper that carries the NK sentinel.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kbqa/value.hpp"

namespace kbqa {

// The KB's instance-of predicate.
inline constexpr std::string_view kTypePredicate = "type.object.type";

struct Variable {
  std::string name;  // without the leading '?'
  auto operator<=>(const Variable&) const = default;
};
struct EntityRef {
  std::string id;
  auto operator<=>(const EntityRef&) const = default;
};
struct ClassRef {
  std::string id;
  auto operator<=>(const ClassRef&) const = default;
};
struct RelationRef {
  std::string id;
  auto operator<=>(const RelationRef&) const = default;
};
struct TypeMarker {
  auto operator<=>(const TypeMarker&) const = default;
};

using Term = std::variant<Variable, EntityRef, ClassRef, RelationRef, Literal, TypeMarker>;

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;
  auto operator<=>(const TriplePattern&) const = default;
};

enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_symbol(Comparator op);

struct Filter {
  std::string variable;
  Comparator op = Comparator::Eq;
  Literal value;
  auto operator<=>(const Filter&) const = default;
};

struct Aggregate {
  enum class Kind : std::uint8_t { None, Count, ArgMax, ArgMin };
  Kind kind = Kind::None;
  std::vector<std::string> path;  // relation chain for ArgMax/ArgMin
  auto operator<=>(const Aggregate&) const = default;
};

struct CanonicalQuery {
  std::string projection;
  bool distinct = true;
  std::vector<TriplePattern> patterns;
  std::vector<Filter> filters;
  Aggregate aggregate;

  bool operator==(const CanonicalQuery&) const = default;
};

enum class Dialect : std::uint8_t { Sparql, SExpr };

std::string_view to_string(Dialect dialect);
// Accepts "sparql" and "sexpr"/"s-expression".
std::optional<Dialect> dialect_from_string(std::string_view name);

// Parsers. Both return canonicalized, validated queries and throw SyntaxError.
CanonicalQuery parse_sparql(std::string_view text);
CanonicalQuery parse_sexpr(std::string_view text);
CanonicalQuery parse_query(Dialect dialect, std::string_view text);

// Rendering. render_sexpr throws kbqa::Error for queries the s-expression
// dialect cannot express (cycles, equality filters, free leaf variables);
// render_sparql throws for ARGMAX/ARGMIN, which the SPARQL subset lacks.
std::string render_sparql(const CanonicalQuery& query);
std::string render_sexpr(const CanonicalQuery& query);
std::string render_query(Dialect dialect, const CanonicalQuery& query);

// Renames variables to a structure-derived scheme (?x for the projection,
// ?v1.. for the rest), then sorts and de-duplicates patterns and filters.
// Idempotent.
CanonicalQuery canonicalize(CanonicalQuery query);

// Throws SyntaxError (position 0) when an AST invariant is violated.
void validate_query(const CanonicalQuery& query);

// Relation ids used by patterns and aggregate paths; excludes the type marker.
std::set<std::string> extract_relations(const CanonicalQuery& query);
// Entity constants; class objects of type assertions are not entities.
std::set<std::string> extract_entities(const CanonicalQuery& query);
std::set<std::string> extract_classes(const CanonicalQuery& query);

std::string term_to_string(const Term& term);

// A generated or gold logical form. Unparseable surface text is allowed and
// recorded; the syntax verifier reports it.
struct LogicalForm {
  Dialect dialect = Dialect::Sparql;
  std::string surface;
  bool nk = false;
  std::optional<CanonicalQuery> canonical;
  std::optional<std::string> parse_error;
  std::size_t parse_error_position = 0;

  static LogicalForm nk_sentinel();
  // Never throws; the literal text "NK" maps to the sentinel.
  static LogicalForm from_text(Dialect dialect, std::string text);
  static LogicalForm from_query(Dialect dialect, const CanonicalQuery& query);

  bool parsed() const { return canonical.has_value(); }
  // Throws NKInputError for NK and PreconditionError when unparsed.
  const CanonicalQuery& query() const;
};

std::set<std::string> extract_relations(const LogicalForm& lf);
std::set<std::string> extract_entities(const LogicalForm& lf);

}  // namespace kbqa
