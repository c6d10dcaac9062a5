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

// QA examples, JSON Lines splits, few-shot sampling and unanswerability
// injection by KB deletion.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/query.hpp"
#include "kbqa/retrieval.hpp"

namespace kbqa {

enum class Label { Answerable, SchemaUnanswerable, DataUnanswerable };
enum class Category { None, MissingClass, MissingRelation, MissingTopicEntity, MissingEntity, MissingFact };

std::string_view to_string(Label label);        // answerable | schema-unans | data-unans
std::string_view to_string(Category category);  // n/a | missing-class | ...
std::optional<Label> label_from_string(std::string_view s);
std::optional<Category> category_from_string(std::string_view s);

struct QAExample {
  std::string question;
  std::vector<LinkedEntity> linked_entities;
  LogicalForm gold_lf;
  std::optional<AnswerSet> gold_answer;  // nullopt is NA
  AnswerSet complete_kb_answer;
  Label label = Label::Answerable;
  Category category = Category::None;

  bool unanswerable() const { return label != Label::Answerable; }
};

// Throws Error describing the first label/logical-form/answer inconsistency.
void validate_example(const QAExample& example);

Json example_to_json(const QAExample& example);
// Throws Error on malformed or inconsistent records.
QAExample example_from_json(const Json& j);

struct DatasetSplit {
  std::string name;
  std::vector<QAExample> examples;
};

// Throws FormatError carrying the 1-based line number.
DatasetSplit load_split(const std::filesystem::path& file, std::string name = "");
void save_split(const DatasetSplit& split, const std::filesystem::path& file);

// Applies `plan` and relabels every example. Requires each source example to
// be answerable with a non-empty answer on `kb` (PreconditionError).
std::pair<KnowledgeBase, DatasetSplit> inject_unanswerability(const KnowledgeBase& kb, const DatasetSplit& split,
                                                             const DeletionPlan& plan);

struct DeletionCounts {
  std::size_t classes = 0;
  std::size_t relations = 0;
  std::size_t entities = 0;
  std::size_t facts = 0;
};

// Uniform choice of ids per kind from a seeded generator; counts larger than
// the available pool take the whole pool.
DeletionPlan random_deletion_plan(const KnowledgeBase& kb, const DeletionCounts& counts, std::uint64_t seed);

// Uniform stratified sample of answerable and unanswerable examples. Throws
// InsufficientExamplesError when a stratum is too small.
DatasetSplit sample_fewshots(const DatasetSplit& split, std::size_t n_answerable, std::size_t n_unanswerable,
                             std::uint64_t seed);

// Chooses k distinct indices out of n, in draw order. Portable across
// standard libraries.
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace kbqa
