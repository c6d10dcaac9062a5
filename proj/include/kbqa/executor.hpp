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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kbqa/kb.hpp"
#include "kbqa/query.hpp"
#include "kbqa/value.hpp"

namespace kbqa {

using Bindings = std::map<std::string, Value>;

// Every variable assignment satisfying all patterns and filters, in the order
// the left-to-right index join produces them.
std::vector<Bindings> solve(const KnowledgeBase& kb, const CanonicalQuery& q);

// Set of projected values; COUNT gives a singleton integer literal, ARGMAX and
// ARGMIN give every projected value attaining the extremum along the path.
// Ids absent from the KB match nothing.
AnswerSet execute(const KnowledgeBase& kb, const CanonicalQuery& q);

// Reference semantics by exhaustive assignment over every entity and literal
// in the KB and query. Throws SizeLimitError when the number of assignments
// would exceed `max_assignments`.
AnswerSet brute_force_execute(const KnowledgeBase& kb, const CanonicalQuery& q,
                              std::uint64_t max_assignments = 20'000'000);

// Orders literals for ARGMAX/ARGMIN: numbers, then dates, then strings.
std::strong_ordering extremum_order(const Literal& a, const Literal& b);

}  // namespace kbqa
