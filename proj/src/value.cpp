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

#include "kbqa/value.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "kbqa/error.hpp"

namespace kbqa {

std::string_view to_string(LiteralType type) {
  switch (type) {
    case LiteralType::Integer: return "integer";
    case LiteralType::Float: return "float";
    case LiteralType::String: return "string";
    case LiteralType::Date: return "date";
  }
  return "string";
}

std::optional<LiteralType> literal_type_from_tag(std::string_view tag) {
  if (tag == "integer") return LiteralType::Integer;
  if (tag == "float") return LiteralType::Float;
  if (tag == "string") return LiteralType::String;
  if (tag == "date") return LiteralType::Date;
  return std::nullopt;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::optional<std::string> canonical_integer(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return std::to_string(value);
}

std::optional<std::string> canonical_float(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    return std::nullopt;
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  std::string out(buf.data(), res.ptr);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

bool valid_date(std::string_view text) {
  // YYYY | YYYY-MM | YYYY-MM-DD, optional leading '-' for BCE years.
  if (!text.empty() && text.front() == '-') text.remove_prefix(1);
  if (text.size() != 4 && text.size() != 7 && text.size() != 10) return false;
  if (!all_digits(text.substr(0, 4))) return false;
  if (text.size() >= 7) {
    if (text[4] != '-' || !all_digits(text.substr(5, 2))) return false;
    int month = (text[5] - '0') * 10 + (text[6] - '0');
    if (month < 1 || month > 12) return false;
  }
  if (text.size() == 10) {
    if (text[7] != '-' || !all_digits(text.substr(8, 2))) return false;
    int day = (text[8] - '0') * 10 + (text[9] - '0');
    if (day < 1 || day > 31) return false;
  }
  return true;
}

}  // namespace

std::optional<std::string> canonical_lexical(std::string_view text, LiteralType type) {
  switch (type) {
    case LiteralType::Integer: return canonical_integer(text);
    case LiteralType::Float: return canonical_float(text);
    case LiteralType::Date:
      if (!valid_date(text)) return std::nullopt;
      return std::string(text);
    case LiteralType::String: return std::string(text);
  }
  return std::nullopt;
}

Literal Literal::make(std::string_view text, LiteralType type) {
  auto lexical = canonical_lexical(text, type);
  if (!lexical)
    throw Error("invalid " + std::string(to_string(type)) + " literal '" + std::string(text) + "'");
  return Literal{std::move(*lexical), type};
}

std::optional<std::strong_ordering> compare_literals(const Literal& a, const Literal& b) {
  if (a.is_numeric() && b.is_numeric()) {
    if (a.type == LiteralType::Integer && b.type == LiteralType::Integer) {
      long long x = std::strtoll(a.lexical.c_str(), nullptr, 10);
      long long y = std::strtoll(b.lexical.c_str(), nullptr, 10);
      return x <=> y;
    }
    double x = std::strtod(a.lexical.c_str(), nullptr);
    double y = std::strtod(b.lexical.c_str(), nullptr);
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  if (a.type != b.type) return std::nullopt;
  int c = a.lexical.compare(b.lexical);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string to_display(const Value& value) {
  if (value.is_entity()) return value.text;
  return value.text + "^^" + std::string(to_string(value.type));
}

}  // namespace kbqa
