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

#include "kbqa/json_io.hpp"

#include "kbqa/error.hpp"

namespace kbqa {

using json = Json;

json value_to_json(const Value& value) {
  if (value.is_entity()) return json{{"entity", value.text}};
  return json{{"literal", value.text}, {"type", std::string(to_string(value.type))}};
}

Value value_from_json(const json& j) {
  if (j.is_string()) return Value::entity(j.get<std::string>());
  if (!j.is_object()) throw Error("value must be a string or an object");
  if (auto e = j.find("entity"); e != j.end()) {
    if (!e->is_string()) throw Error("entity id must be a string");
    return Value::entity(e->get<std::string>());
  }
  auto lit = j.find("literal");
  auto tag = j.find("type");
  if (lit == j.end() || tag == j.end() || !tag->is_string())
    throw Error("literal values need 'literal' and 'type' fields");
  auto type = literal_type_from_tag(tag->get<std::string>());
  if (!type) throw Error("unknown literal type '" + tag->get<std::string>() + "'");
  std::string text;
  if (lit->is_string()) text = lit->get<std::string>();
  else if (lit->is_number()) text = lit->dump();
  else throw Error("literal must be a string or a number");
  return Value::literal(Literal::make(text, *type));
}

json answer_to_json(const AnswerSet& answer) {
  json out = json::array();
  for (const auto& v : answer) {
    if (v.is_entity()) out.push_back(v.text);
    else out.push_back(value_to_json(v));
  }
  return out;
}

AnswerSet answer_from_json(const json& j) {
  if (!j.is_array()) throw Error("answer must be a list");
  AnswerSet out;
  for (const auto& v : j) out.insert(value_from_json(v));
  return out;
}

json fact_to_json(const Fact& fact) {
  return json{{"s", fact.subject}, {"r", fact.relation}, {"o", value_to_json(fact.object)}};
}

}  // namespace kbqa
