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

// JSON encodings shared by the file formats.

#include <nlohmann/json.hpp>

#include "kbqa/kb.hpp"
#include "kbqa/value.hpp"

namespace kbqa {

// Insertion-ordered so written files keep a stable, readable key order.
using Json = nlohmann::ordered_json;

// Entities encode as {"entity": id}, literals as {"literal": text, "type": tag}.
Json value_to_json(const Value& value);
// Accepts both object forms and a bare string (an entity id).
Value value_from_json(const Json& j);

// Answer lists: entities as bare strings, literals as objects.
Json answer_to_json(const AnswerSet& answer);
AnswerSet answer_from_json(const Json& j);

Json fact_to_json(const Fact& fact);

}  // namespace kbqa
