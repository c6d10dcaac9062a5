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

// Per-question orchestration: generation, the verify-and-repair loop,
// candidate consensus, and the trace of everything that happened.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kbqa/dataset.hpp"
#include "kbqa/gateway.hpp"
#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/prompts.hpp"
#include "kbqa/retrieval.hpp"
#include "kbqa/verifiers.hpp"

namespace kbqa {

struct FunConfig {
  int n = 4;  // repair iterations; n + 1 forms are verified at most
  bool answerable_mode = false;
  std::set<std::string> mediator_classes;
  Dialect dialect = Dialect::Sparql;
};

struct PipelineConfig {
  FunConfig fun;
  RetrievalCaps caps;
  std::vector<QAExample> fewshots;
  const TemplateCatalog* templates = nullptr;  // defaults when null
  std::size_t workers = 1;

  const TemplateCatalog& catalog() const { return templates ? *templates : TemplateCatalog::defaults(); }
};

struct Candidate {
  LogicalForm lf;
  AnswerSet answer;
  std::map<std::string, bool> weak_profile;
  std::optional<std::string> back_translation;
  int iteration = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::string lf_text;
  bool nk = false;
  std::vector<Verdict> verdicts;
  std::vector<std::string> feedback;
  bool admitted = false;
  std::optional<AnswerSet> answer;  // set once the form was executed
};

struct ConsensusRecord {
  // confident | majority | empty-answer | no-consensus | self-consistency | error
  std::string branch;
  std::size_t pool_size = 0;
  std::size_t supporters = 0;
  std::size_t threshold = 0;
  std::optional<int> selected_iteration;
  bool selection_fallback = false;
};

struct Trace {
  std::string question;
  RetrievalContext context;
  std::vector<IterationRecord> iterations;
  std::vector<int> candidate_iterations;
  ConsensusRecord consensus;
  std::vector<Exchange> exchanges;
};

struct PipelineOutcome {
  LogicalForm lf = LogicalForm::nk_sentinel();
  std::optional<AnswerSet> answer;  // nullopt is NA
  bool confident = false;
  Trace trace;
  std::optional<std::string> error;
};

// The generation prompt for one question.
std::string build_generation_prompt(const std::string& question, const RetrievalContext& ctx,
                                    const std::vector<QAExample>& fewshots, bool answerable_mode,
                                    const TemplateCatalog& templates);

// Generation from a prompt: one gateway call whose reply is cleaned and
// parsed. A parse failure is kept on the form, not raised.
LogicalForm generate(GenerationGateway& gateway, Conversation& conversation, Dialect dialect,
                     std::vector<Exchange>* log, const std::string& purpose);

struct FunResult {
  bool confident = false;
  LogicalForm lf;
  AnswerSet answer;  // meaningful when confident
  std::vector<Candidate> candidates;
};

// The verify-and-repair loop starting from the form already in
// `conversation` (its last assistant message).
FunResult fun(GenerationGateway& gateway, const std::string& question, const std::set<std::string>& question_entities,
              LogicalForm lf0, Conversation& conversation, const FunConfig& cfg, const KnowledgeBase& kb,
              const TemplateCatalog& templates, Trace& trace);

struct SelectionResult {
  std::size_t index = 0;
  bool fallback = false;
};

// Picks the candidate whose back-translated question is closest to
// `question`. A single candidate needs no call; an unparseable reply falls
// back to the first (earliest) candidate.
SelectionResult select_best(GenerationGateway& gateway, const std::string& question,
                            const std::vector<Candidate>& candidates, const TemplateCatalog& templates,
                            std::vector<Exchange>* log);

struct ConsensusResult {
  LogicalForm lf = LogicalForm::nk_sentinel();
  std::optional<AnswerSet> answer;
  ConsensusRecord record;
};

ConsensusResult scun(GenerationGateway& gateway, const std::string& question, const std::vector<Candidate>& pool,
                     const TemplateCatalog& templates, std::vector<Exchange>* log);

// Plain majority over non-empty answers without a threshold; used in
// answerable mode.
ConsensusResult self_consistency(GenerationGateway& gateway, const std::string& question,
                                 const std::vector<Candidate>& pool, const TemplateCatalog& templates,
                                 std::vector<Exchange>* log);

PipelineOutcome run_question(GenerationGateway& gateway, const KnowledgeBase& kb,
                             const std::vector<const Retriever*>& retrievers, const QAExample& example,
                             const PipelineConfig& cfg);

// Outcomes in input order; questions run on up to cfg.workers threads.
std::vector<PipelineOutcome> run_dataset(GenerationGateway& gateway, const KnowledgeBase& kb,
                                         const std::vector<const Retriever*>& retrievers, const DatasetSplit& split,
                                         const PipelineConfig& cfg);

Json trace_to_json(const PipelineOutcome& outcome);
// One outcomes.jsonl record: {question, lf, answer, confident, error}.
Json outcome_to_json(const QAExample& example, const PipelineOutcome& outcome);

}  // namespace kbqa
