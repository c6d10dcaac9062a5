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

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace kbqa {

enum class LiteralType : std::uint8_t { Integer, Float, String, Date };

std::string_view to_string(LiteralType type);
std::optional<LiteralType> literal_type_from_tag(std::string_view tag);

// Canonical lexical form of `text` under `type`, or nullopt when the text is
// not a valid lexical form. Integers lose leading zeros and '+', floats are
// printed shortest-round-trip and always carry a '.' or exponent, dates must
// be YYYY, YYYY-MM or YYYY-MM-DD.
std::optional<std::string> canonical_lexical(std::string_view text, LiteralType type);

struct Literal {
  std::string lexical;
  LiteralType type = LiteralType::String;

  // Throws kbqa::Error when the lexical form is invalid for the type.
  static Literal make(std::string_view text, LiteralType type);

  bool is_numeric() const {
    return type == LiteralType::Integer || type == LiteralType::Float;
  }

  auto operator<=>(const Literal&) const = default;
};

// Three-way comparison used by FILTER and ARGMAX/ARGMIN. Integers and floats
// compare numerically with each other; dates and strings compare only with
// their own kind. Cross-kind pairs are incomparable.
std::optional<std::strong_ordering> compare_literals(const Literal& a, const Literal& b);

// A node an answer can contain: an entity id or a typed literal.
struct Value {
  enum class Kind : std::uint8_t { Entity, Literal };

  Kind kind = Kind::Entity;
  std::string text;
  LiteralType type = LiteralType::String;

  static Value entity(std::string id) { return Value{Kind::Entity, std::move(id), LiteralType::String}; }
  static Value literal(const Literal& lit) { return Value{Kind::Literal, lit.lexical, lit.type}; }

  bool is_entity() const { return kind == Kind::Entity; }
  bool is_literal() const { return kind == Kind::Literal; }
  Literal as_literal() const { return Literal{text, type}; }

  auto operator<=>(const Value&) const = default;
};

using AnswerSet = std::set<Value>;

std::string to_display(const Value& value);

}  // namespace kbqa
