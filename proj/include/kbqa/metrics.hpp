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

// EM-s logical-form agreement, regular and lenient answer F1, and slice
// reports over a labelled split.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kbqa/dataset.hpp"
#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/query.hpp"

namespace kbqa {

// One predicted outcome as stored in outcomes.jsonl.
struct Prediction {
  std::string question;
  LogicalForm lf = LogicalForm::nk_sentinel();
  std::optional<AnswerSet> answer;  // nullopt is NA; an empty list reads as NA
};

Prediction prediction_from_json(const Json& j);
// Throws FormatError carrying the 1-based line number.
std::vector<Prediction> load_predictions(const std::filesystem::path& file);

// 1 when both are NK, or when relations, entities and answers on `kb` all
// agree. An unparseable prediction scores 0.
int em_s(const LogicalForm& pred, const LogicalForm& gold, const KnowledgeBase& kb);
// Same test with the executed answers supplied by the caller (NA counts as
// the empty answer).
int em_s_given_answers(const LogicalForm& pred, const LogicalForm& gold, const std::optional<AnswerSet>& pred_answer,
                       const std::optional<AnswerSet>& gold_answer);

double set_f1(const AnswerSet& pred, const AnswerSet& gold);
// Both NA scores 1, one NA scores 0. Lenient scoring also gives 1 when the
// prediction equals the non-empty complete-KB answer.
double f1_answers(const std::optional<AnswerSet>& pred, const std::optional<AnswerSet>& gold,
                  const AnswerSet& complete_kb_answer, bool lenient);

struct EvaluationRecord {
  std::size_t index = 0;
  std::string question;
  Label label = Label::Answerable;
  Category category = Category::None;
  int em_s = 0;
  double f1_r = 0.0;
  double f1_l = 0.0;
  bool parse_fail = false;
};

// With a KB the EM-s answers are re-executed on it; without one the recorded
// answers are compared.
EvaluationRecord evaluate(std::size_t index, const QAExample& example, const Prediction& prediction,
                          const KnowledgeBase* kb = nullptr);

// Throws Error when the two lists differ in length.
std::vector<EvaluationRecord> evaluate_all(const std::vector<QAExample>& examples,
                                           const std::vector<Prediction>& predictions,
                                           const KnowledgeBase* kb = nullptr);

struct SliceMetrics {
  std::string name;
  std::size_t count = 0;
  // Percentages; nullopt for an empty slice.
  std::optional<double> f1_r;
  std::optional<double> f1_l;
  std::optional<double> em_s;
};

struct Report {
  std::size_t total = 0;
  // overall, answerable, unanswerable, schema-level, data-level, then one
  // slice per unanswerability category.
  std::vector<SliceMetrics> slices;

  const SliceMetrics& slice(const std::string& name) const;
};

Report aggregate(const std::vector<EvaluationRecord>& records);

Json report_to_json(const Report& report);
std::string report_to_text(const Report& report);
std::string records_to_csv(const std::vector<EvaluationRecord>& records);

}  // namespace kbqa
