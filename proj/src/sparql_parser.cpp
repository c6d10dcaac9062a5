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

#include <algorithm>
#include <cctype>
#include <set>

#include "kbqa/error.hpp"
#include "kbqa/query.hpp"

namespace kbqa {
namespace {

enum class Tok { Var, PName, Iri, Integer, Float, String, Word, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;    // variable name, local id, literal body, word, or punct
  std::string prefix;  // PName prefix
  std::size_t pos = 0;
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }
bool is_local_char(char c) { return is_name_char(c) || c == '.'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (i_ >= src_.size()) {
        out.push_back(Token{Tok::End, "", "", i_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }

  Token next() {
    std::size_t start = i_;
    char c = src_[i_];
    if (c == '?' || c == '$') {
      ++i_;
      std::size_t b = i_;
      while (i_ < src_.size() && is_name_char(src_[i_])) ++i_;
      if (b == i_) throw SyntaxError("empty variable name at position " + std::to_string(start), start);
      return Token{Tok::Var, std::string(src_.substr(b, i_ - b)), "", start};
    }
    if (c == '"' || c == '\'') return string_token(c, start);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number(start);
    }
    if (c == '<') {
      // IRI when a '>' closes it before any whitespace.
      std::size_t j = i_ + 1;
      while (j < src_.size() && src_[j] != '>' && !std::isspace(static_cast<unsigned char>(src_[j]))) ++j;
      if (j < src_.size() && src_[j] == '>' && j > i_ + 1 && src_[i_ + 1] != '=') {
        std::string iri(src_.substr(i_ + 1, j - i_ - 1));
        i_ = j + 1;
        return Token{Tok::Iri, iri, "", start};
      }
      if (peek(1) == '=') {
        i_ += 2;
        return Token{Tok::Punct, "<=", "", start};
      }
      ++i_;
      return Token{Tok::Punct, "<", "", start};
    }
    if (c == '>' || c == '!' || c == '=') {
      if (peek(1) == '=') {
        i_ += 2;
        return Token{Tok::Punct, std::string{c, '='}, "", start};
      }
      if (c == '!') throw SyntaxError("unexpected '!' at position " + std::to_string(start), start);
      ++i_;
      return Token{Tok::Punct, std::string(1, c), "", start};
    }
    if (c == '^' && peek(1) == '^') {
      i_ += 2;
      return Token{Tok::Punct, "^^", "", start};
    }
    if (std::string_view("{}().;,*").find(c) != std::string_view::npos) {
      ++i_;
      return Token{Tok::Punct, std::string(1, c), "", start};
    }
    if (c == ':' || is_name_start(c)) {
      std::size_t b = i_;
      while (i_ < src_.size() && is_name_char(src_[i_])) ++i_;
      if (peek() == ':') {
        std::string prefix(src_.substr(b, i_ - b));
        ++i_;
        std::size_t lb = i_;
        while (i_ < src_.size() && is_local_char(src_[i_])) ++i_;
        // A local name never ends in '.'; that dot terminates the triple.
        while (i_ > lb && src_[i_ - 1] == '.') --i_;
        return Token{Tok::PName, std::string(src_.substr(lb, i_ - lb)), prefix, start};
      }
      return Token{Tok::Word, std::string(src_.substr(b, i_ - b)), "", start};
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "' at position " + std::to_string(start),
                      start);
  }

  Token string_token(char quote_char, std::size_t start) {
    ++i_;
    std::string body;
    while (i_ < src_.size() && src_[i_] != quote_char) {
      if (src_[i_] == '\\' && i_ + 1 < src_.size()) ++i_;
      body += src_[i_++];
    }
    if (i_ >= src_.size()) throw SyntaxError("unterminated string literal", start);
    ++i_;
    if (peek() == '@') {  // language tags are accepted and dropped
      ++i_;
      while (i_ < src_.size() && (is_name_char(src_[i_]))) ++i_;
    }
    return Token{Tok::String, body, "", start};
  }

  Token number(std::size_t start) {
    std::size_t b = i_;
    if (src_[i_] == '-' || src_[i_] == '+') ++i_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
    bool is_float = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      ++i_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      i_ += 2;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
    }
    return Token{is_float ? Tok::Float : Tok::Integer, std::string(src_.substr(b, i_ - b)), "", start};
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

std::optional<LiteralType> xsd_type(std::string_view name) {
  auto hash = name.find_last_of("#:/");
  if (hash != std::string_view::npos) name = name.substr(hash + 1);
  if (name == "integer" || name == "int" || name == "long" || name == "short") return LiteralType::Integer;
  if (name == "float" || name == "double" || name == "decimal") return LiteralType::Float;
  if (name == "date" || name == "dateTime" || name == "gYear" || name == "gYearMonth") return LiteralType::Date;
  if (name == "string") return LiteralType::String;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  CanonicalQuery parse() {
    while (is_word("PREFIX")) parse_prefix();
    expect_word("SELECT");
    CanonicalQuery q;
    q.distinct = false;
    if (is_word("DISTINCT")) {
      ++i_;
      q.distinct = true;
    }
    if (is_punct("(")) {
      ++i_;
      expect_word("COUNT");
      expect_punct("(");
      if (is_word("DISTINCT")) {
        ++i_;
        q.distinct = true;
      }
      q.projection = expect_var();
      expect_punct(")");
      expect_word("AS");
      expect_var();
      expect_punct(")");
      q.aggregate.kind = Aggregate::Kind::Count;
    } else if (is_punct("*")) {
      fail("only a single projected variable is supported");
    } else {
      q.projection = expect_var();
    }
    if (cur().kind == Tok::Var) fail("only a single projected variable is supported");
    if (is_word("WHERE")) ++i_;
    expect_punct("{");
    parse_body(q);
    expect_punct("}");
    if (cur().kind != Tok::End) {
      if (cur().kind == Tok::Word) fail_word();
      fail("unexpected '" + cur().text + "' after the query body");
    }
    validate_query(q);
    return canonicalize(std::move(q));
  }

 private:
  const Token& cur() const { return toks_[i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " at position " + std::to_string(cur().pos), cur().pos);
  }
  [[noreturn]] void fail_word() const {
    throw SyntaxError("word " + cur().text + " not defined", cur().pos);
  }

  std::string found() const {
    if (cur().kind == Tok::End) return "end of query";
    if (cur().kind == Tok::Var) return "'?" + cur().text + "'";
    if (cur().kind == Tok::PName) return "'" + cur().prefix + ":" + cur().text + "'";
    return "'" + cur().text + "'";
  }

  bool is_word(std::string_view w) const { return cur().kind == Tok::Word && upper(cur().text) == w; }
  bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }

  void expect_word(std::string_view w) {
    if (is_word(w)) {
      ++i_;
      return;
    }
    if (cur().kind == Tok::Word) fail_word();
    fail("expected " + std::string(w) + " but found " + found());
  }

  void expect_punct(std::string_view p) {
    if (is_punct(p)) {
      ++i_;
      return;
    }
    if (cur().kind == Tok::Word) fail_word();
    fail("expected '" + std::string(p) + "' but found " + found());
  }

  std::string expect_var() {
    if (cur().kind != Tok::Var) {
      if (cur().kind == Tok::Word) fail_word();
      fail("expected a variable but found " + found());
    }
    return toks_[i_++].text;
  }

  void parse_prefix() {
    ++i_;
    if (cur().kind != Tok::PName || !cur().text.empty()) fail("malformed PREFIX declaration");
    prefixes_.insert(cur().prefix);
    ++i_;
    if (cur().kind != Tok::Iri) fail("PREFIX declaration needs an IRI");
    ++i_;
  }

  std::string resolve_pname(const Token& t) const {
    if (!t.prefix.empty() && t.prefix != "ns" && !prefixes_.count(t.prefix))
      throw SyntaxError("prefix " + t.prefix + ": not defined", t.pos);
    if (t.text.empty()) throw SyntaxError("empty identifier after prefix", t.pos);
    return t.text;
  }

  static std::string iri_local(const std::string& iri) {
    auto slash = iri.find_last_of("/#");
    return slash == std::string::npos ? iri : iri.substr(slash + 1);
  }

  // Reads one subject/object position term. `class_position` is set for the
  // object of a type assertion.
  Term parse_node(bool class_position) {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var: ++i_; return Variable{t.text};
      case Tok::PName: {
        std::string id = resolve_pname(t);
        ++i_;
        if (class_position) return ClassRef{id};
        return EntityRef{id};
      }
      case Tok::Iri: {
        std::string id = iri_local(t.text);
        ++i_;
        if (class_position) return ClassRef{id};
        return EntityRef{id};
      }
      case Tok::Integer:
      case Tok::Float:
      case Tok::String: return parse_literal();
      case Tok::Word: fail_word();
      default: fail("expected a term but found " + found());
    }
  }

  Literal parse_literal() {
    const Token t = cur();
    ++i_;
    try {
      if (t.kind == Tok::Integer) return Literal::make(t.text, LiteralType::Integer);
      if (t.kind == Tok::Float) return Literal::make(t.text, LiteralType::Float);
      if (t.kind != Tok::String) fail("expected a literal but found " + found());
      if (is_punct("^^")) {
        ++i_;
        std::string type_name;
        if (cur().kind == Tok::PName) type_name = cur().text;
        else if (cur().kind == Tok::Iri) type_name = cur().text;
        else fail("expected a datatype after ^^");
        auto type = xsd_type(type_name);
        if (!type) fail("unsupported datatype " + type_name);
        ++i_;
        std::string body = t.text;
        if (*type == LiteralType::Date && body.size() > 10 && body[10] == 'T') body = body.substr(0, 10);
        return Literal::make(body, *type);
      }
      return Literal::make(t.text, LiteralType::String);
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      throw SyntaxError(e.what(), t.pos);
    }
  }

  Term parse_predicate() {
    const Token& t = cur();
    if (t.kind == Tok::Word && t.text == "a") {
      ++i_;
      return TypeMarker{};
    }
    std::string id;
    if (t.kind == Tok::PName) {
      id = resolve_pname(t);
    } else if (t.kind == Tok::Iri) {
      id = iri_local(t.text);
      if (id == "type" || t.text.find("rdf-syntax-ns#type") != std::string::npos) id = std::string(kTypePredicate);
    } else if (t.kind == Tok::Var) {
      fail("variable predicates are not supported");
    } else if (t.kind == Tok::Word) {
      fail_word();
    } else {
      fail("expected a relation but found " + found());
    }
    ++i_;
    if (id == kTypePredicate) return TypeMarker{};
    return RelationRef{id};
  }

  void parse_filter(CanonicalQuery& q) {
    ++i_;
    expect_punct("(");
    bool flipped = false;
    std::string var;
    Literal lit;
    if (cur().kind == Tok::Var) {
      var = expect_var();
    } else {
      lit = parse_literal();
      flipped = true;
    }
    if (cur().kind != Tok::Punct) {
      if (cur().kind == Tok::Word) fail_word();
      fail("expected a comparison operator but found " + found());
    }
    std::string op_text = cur().text;
    Comparator op;
    if (op_text == "=") op = Comparator::Eq;
    else if (op_text == "!=") op = Comparator::Ne;
    else if (op_text == "<") op = Comparator::Lt;
    else if (op_text == "<=") op = Comparator::Le;
    else if (op_text == ">") op = Comparator::Gt;
    else if (op_text == ">=") op = Comparator::Ge;
    else fail("expected a comparison operator but found " + found());
    ++i_;
    if (flipped) {
      var = expect_var();
      switch (op) {
        case Comparator::Lt: op = Comparator::Gt; break;
        case Comparator::Le: op = Comparator::Ge; break;
        case Comparator::Gt: op = Comparator::Lt; break;
        case Comparator::Ge: op = Comparator::Le; break;
        default: break;
      }
    } else {
      if (cur().kind == Tok::Var) fail("FILTER comparisons between two variables are not supported");
      lit = parse_literal();
    }
    expect_punct(")");
    q.filters.push_back(Filter{var, op, lit});
  }

  void parse_body(CanonicalQuery& q) {
    while (!is_punct("}") && cur().kind != Tok::End) {
      if (is_word("FILTER")) {
        parse_filter(q);
      } else if (cur().kind == Tok::Word && cur().text != "a") {
        fail_word();
      } else {
        Term subject = parse_node(false);
        for (;;) {
          Term predicate = parse_predicate();
          bool type_assert = std::holds_alternative<TypeMarker>(predicate);
          for (;;) {
            Term object = parse_node(type_assert);
            q.patterns.push_back(TriplePattern{subject, predicate, object});
            if (!is_punct(",")) break;
            ++i_;
          }
          if (!is_punct(";")) break;
          ++i_;
          if (is_punct(".") || is_punct("}")) break;
        }
      }
      if (is_punct(".")) {
        ++i_;
      } else if (!is_punct("}") && !is_word("FILTER")) {
        if (cur().kind == Tok::Word) fail_word();
        fail("expected '.' or '}' but found " + found());
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::set<std::string> prefixes_;
};

}  // namespace

CanonicalQuery parse_sparql(std::string_view text) { return Parser(text).parse(); }

}  // namespace kbqa
