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

#include "kbqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>

#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& items, const std::string& sep, F render) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += render(items[i]);
  }
  return out;
}

}  // namespace

std::string build_generation_prompt(const std::string& question, const RetrievalContext& ctx,
                                    const std::vector<QAExample>& fewshots, bool answerable_mode,
                                    const TemplateCatalog& templates) {
  std::string prompt = templates.render(answerable_mode ? "pa-header" : "pun-header", {});
  if (!answerable_mode) prompt += "\n\n" + templates.render("pun-nk-exemplar", {});
  for (const auto& ex : fewshots) {
    std::string lf = ex.gold_lf.nk ? "NK" : ex.gold_lf.surface;
    prompt += "\n\n" + templates.render("pun-fewshot", {{"question", ex.question}, {"sparql", lf}});
  }
  std::map<std::string, std::string> b;
  b["question"] = question;
  b["entities"] = join(ctx.linked_entities, "| ", [](const LinkedEntity& e) { return e.mention + " " + e.id; });
  b["paths"] = join(ctx.paths, " | ", [](const CanonicalQuery& q) { return render_path_compact(q); });
  b["classes"] = join(ctx.classes, "| ", [](const std::string& c) { return c; });
  b["relations"] = join(ctx.relations, " | ", [](const RelationEntry& r) { return r.signature; });
  prompt += "\n\n" + templates.render("pun-question", b);
  return prompt;
}

LogicalForm generate(GenerationGateway& gateway, Conversation& conversation, Dialect dialect,
                     std::vector<Exchange>* log, const std::string& purpose) {
  std::string reply = gateway.complete(conversation);
  if (log) log->push_back(Exchange{purpose, conversation.latest_user_text(), reply});
  conversation.add(Role::Assistant, reply);
  return LogicalForm::from_text(dialect, clean_generation(reply));
}

FunResult fun(GenerationGateway& gateway, const std::string& question, const std::set<std::string>& question_entities,
              LogicalForm lf0, Conversation& conversation, const FunConfig& cfg, const KnowledgeBase& kb,
              const TemplateCatalog& templates, Trace& trace) {
  if (cfg.n < 1) throw PreconditionError("the number of repair iterations must be at least 1");
  const VerifierSuite suite = VerifierSuite::standard(cfg.answerable_mode);
  FunResult result;
  LogicalForm lf = std::move(lf0);

  for (int iteration = 1; iteration <= cfg.n + 1; ++iteration) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.lf_text = lf.surface;
    rec.nk = lf.nk;

    std::optional<AnswerChecks> checks;
    auto answer_checks = [&]() -> const AnswerChecks& {
      if (!checks)
        checks = v4_answer_consistency(lf, kb, question_entities, cfg.mediator_classes, cfg.answerable_mode, templates);
      return *checks;
    };
    std::optional<std::string> back_translation;
    auto run = [&](const std::string& id) -> Verdict {
      using namespace verifier_id;
      Verdict v;
      if (id == kSyntax) v = v1_syntax(lf, templates);
      else if (id == kTypes) v = v2a_type_compatibility(lf, kb, templates);
      else if (id == kSchema) v = v2b_schema_presence(lf, kb, templates);
      else if (id == kCasting) v = v2c_literal_casting(lf, kb, templates);
      else if (id == kAnswerEntity) v = answer_checks().answer_entity;
      else if (id == kIntermediate) v = answer_checks().intermediate;
      else if (id == kEmptyAnswer) v = answer_checks().empty_answer;
      else if (id == kAgreement) {
        v = v3_question_lf_agreement(lf, question, gateway, templates, &trace.exchanges);
        back_translation = v.back_translation;
      } else {
        throw PreconditionError("unknown verifier " + id);
      }
      v.strength = suite.strength_of(id);
      rec.verdicts.push_back(v);
      if (!v.passed) rec.feedback.push_back(v.feedback);
      return v;
    };

    bool strong_ok = true;
    for (const auto& id : suite.strong) {
      if (!run(id).passed) {
        strong_ok = false;
        break;
      }
    }
    if (strong_ok) {
      rec.answer = answer_checks().answer;
      std::map<std::string, bool> profile;
      std::size_t weak_passed = 0;
      for (const auto& id : suite.weak) {
        bool ok = run(id).passed;
        profile[id] = ok;
        weak_passed += ok ? 1 : 0;
      }
      if (weak_passed == suite.weak.size()) {
        trace.iterations.push_back(std::move(rec));
        result.confident = true;
        result.answer = answer_checks().answer;
        result.lf = lf;
        return result;
      }
      if (weak_passed > 0) {
        rec.admitted = true;
        result.candidates.push_back(Candidate{lf, answer_checks().answer, profile, back_translation, iteration});
        trace.candidate_iterations.push_back(iteration);
      }
    }
    std::string feedback = join(rec.feedback, "\n", [](const std::string& s) { return s; });
    trace.iterations.push_back(std::move(rec));
    if (iteration == cfg.n + 1) break;
    conversation.add(Role::User, feedback);
    lf = generate(gateway, conversation, cfg.dialect, &trace.exchanges, "repair");
  }
  result.lf = lf;
  return result;
}

SelectionResult select_best(GenerationGateway& gateway, const std::string& question,
                            const std::vector<Candidate>& candidates, const TemplateCatalog& templates,
                            std::vector<Exchange>* log) {
  if (candidates.empty()) throw PreconditionError("select_best needs at least one candidate");
  if (candidates.size() == 1) return {0, false};
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    lines.push_back(templates.render("scun-candidate", {{"index", std::to_string(i + 1)},
                                                        {"question", c.back_translation.value_or(c.lf.surface)}}));
  }
  std::string prompt = templates.render(
      "scun-select", {{"question", question},
                      {"candidates", join(lines, "\n", [](const std::string& s) { return s; })},
                      {"count", std::to_string(candidates.size())}});
  Conversation conv;
  conv.add(Role::User, prompt);
  std::string reply = gateway.complete(conv);
  if (log) log->push_back(Exchange{"scun-select", prompt, reply});

  for (std::size_t i = 0; i < reply.size();) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
    std::string digits = reply.substr(i, j - i);
    if (digits.size() <= 6) {
      std::size_t k = std::stoul(digits);
      if (k >= 1 && k <= candidates.size()) return {k - 1, false};
    }
    i = j;
  }
  return {0, true};
}

namespace {

struct AnswerGroup {
  AnswerSet answer;
  std::vector<std::size_t> members;  // indices into the pool, in pool order
};

std::vector<AnswerGroup> group_non_empty(const std::vector<Candidate>& pool) {
  std::vector<AnswerGroup> groups;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].answer.empty()) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const AnswerGroup& g) { return g.answer == pool[i].answer; });
    if (it == groups.end()) groups.push_back(AnswerGroup{pool[i].answer, {i}});
    else it->members.push_back(i);
  }
  return groups;
}

// Largest group; ties go to the group whose first member came earliest.
const AnswerGroup* most_popular(const std::vector<AnswerGroup>& groups, const std::vector<Candidate>& pool) {
  const AnswerGroup* best = nullptr;
  for (const auto& g : groups) {
    if (!best || g.members.size() > best->members.size() ||
        (g.members.size() == best->members.size() &&
         pool[g.members.front()].iteration < pool[best->members.front()].iteration))
      best = &g;
  }
  return best;
}

ConsensusResult choose(GenerationGateway& gateway, const std::string& question, const std::vector<Candidate>& pool,
                       const std::vector<std::size_t>& members, const TemplateCatalog& templates,
                       std::vector<Exchange>* log, ConsensusRecord record, bool with_answer) {
  std::vector<Candidate> subset;
  for (std::size_t i : members) subset.push_back(pool[i]);
  SelectionResult sel = select_best(gateway, question, subset, templates, log);
  const Candidate& chosen = subset[sel.index];
  record.selected_iteration = chosen.iteration;
  record.selection_fallback = sel.fallback;
  ConsensusResult out;
  out.lf = chosen.lf;
  if (with_answer) out.answer = chosen.answer;
  out.record = std::move(record);
  return out;
}

}  // namespace

ConsensusResult scun(GenerationGateway& gateway, const std::string& question, const std::vector<Candidate>& pool,
                     const TemplateCatalog& templates, std::vector<Exchange>* log) {
  ConsensusRecord record;
  record.pool_size = pool.size();
  record.threshold = pool.size() / 2;
  auto groups = group_non_empty(pool);
  if (const AnswerGroup* top = most_popular(groups, pool)) {
    record.supporters = top->members.size();
    if (top->members.size() > record.threshold) {
      record.branch = "majority";
      return choose(gateway, question, pool, top->members, templates, log, record, true);
    }
  }
  std::vector<std::size_t> empty;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].answer.empty()) empty.push_back(i);
  if (!empty.empty()) {
    record.branch = "empty-answer";
    return choose(gateway, question, pool, empty, templates, log, record, false);
  }
  record.branch = "no-consensus";
  ConsensusResult out;
  out.record = record;
  return out;
}

ConsensusResult self_consistency(GenerationGateway& gateway, const std::string& question,
                                 const std::vector<Candidate>& pool, const TemplateCatalog& templates,
                                 std::vector<Exchange>* log) {
  ConsensusRecord record;
  record.branch = "self-consistency";
  record.pool_size = pool.size();
  auto groups = group_non_empty(pool);
  if (const AnswerGroup* top = most_popular(groups, pool)) {
    record.supporters = top->members.size();
    return choose(gateway, question, pool, top->members, templates, log, record, true);
  }
  record.branch = "no-consensus";
  ConsensusResult out;
  out.record = record;
  return out;
}

PipelineOutcome run_question(GenerationGateway& gateway, const KnowledgeBase& kb,
                             const std::vector<const Retriever*>& retrievers, const QAExample& example,
                             const PipelineConfig& cfg) {
  const TemplateCatalog& templates = cfg.catalog();
  PipelineOutcome out;
  out.trace.question = example.question;
  try {
    out.trace.context = retrieve_union(retrievers, kb, example.question, example.linked_entities, cfg.caps);
    std::set<std::string> question_entities;
    for (const auto& e : example.linked_entities) question_entities.insert(e.id);

    Conversation conversation;
    conversation.add(Role::User, build_generation_prompt(example.question, out.trace.context, cfg.fewshots,
                                                         cfg.fun.answerable_mode, templates));
    LogicalForm lf0 = generate(gateway, conversation, cfg.fun.dialect, &out.trace.exchanges, "generate");
    FunResult fr = fun(gateway, example.question, question_entities, std::move(lf0), conversation, cfg.fun, kb,
                       templates, out.trace);
    if (fr.confident) {
      out.confident = true;
      out.lf = fr.lf;
      out.answer = fr.answer;
      out.trace.consensus.branch = "confident";
      out.trace.consensus.pool_size = fr.candidates.size();
      out.trace.consensus.selected_iteration = out.trace.iterations.back().iteration;
      return out;
    }
    ConsensusResult c = cfg.fun.answerable_mode
                            ? self_consistency(gateway, example.question, fr.candidates, templates, &out.trace.exchanges)
                            : scun(gateway, example.question, fr.candidates, templates, &out.trace.exchanges);
    out.lf = c.lf;
    out.answer = c.answer;
    out.trace.consensus = c.record;
  } catch (const GatewayError& e) {
    out.lf = LogicalForm::nk_sentinel();
    out.answer = std::nullopt;
    out.confident = false;
    out.error = std::string("gateway: ") + e.what();
    out.trace.consensus.branch = "error";
  } catch (const Error& e) {
    out.lf = LogicalForm::nk_sentinel();
    out.answer = std::nullopt;
    out.confident = false;
    out.error = e.what();
    out.trace.consensus.branch = "error";
  }
  return out;
}

std::vector<PipelineOutcome> run_dataset(GenerationGateway& gateway, const KnowledgeBase& kb,
                                         const std::vector<const Retriever*>& retrievers, const DatasetSplit& split,
                                         const PipelineConfig& cfg) {
  std::vector<PipelineOutcome> outcomes(split.examples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < split.examples.size(); i = next++)
      outcomes[i] = run_question(gateway, kb, retrievers, split.examples[i], cfg);
  };
  std::size_t n = std::max<std::size_t>(1, std::min(cfg.workers, split.examples.size()));
  if (n <= 1) {
    worker();
    return outcomes;
  }
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return outcomes;
}

// ---------------------------------------------------------------------------

namespace {

Json lf_to_json(const LogicalForm& lf) {
  if (lf.nk) return "NK";
  return Json{{"dialect", std::string(to_string(lf.dialect))}, {"text", lf.surface}};
}

Json optional_answer(const std::optional<AnswerSet>& a) { return a ? answer_to_json(*a) : Json("NA"); }

}  // namespace

Json outcome_to_json(const QAExample& example, const PipelineOutcome& outcome) {
  Json j;
  j["question"] = example.question;
  j["lf"] = lf_to_json(outcome.lf);
  j["answer"] = optional_answer(outcome.answer);
  j["confident"] = outcome.confident;
  j["error"] = outcome.error ? Json(*outcome.error) : Json(nullptr);
  return j;
}

Json trace_to_json(const PipelineOutcome& outcome) {
  const Trace& t = outcome.trace;
  Json j;
  j["question"] = t.question;
  j["context"] = context_to_json(t.context);
  j["iterations"] = Json::array();
  for (const auto& it : t.iterations) {
    Json r;
    r["iteration"] = it.iteration;
    r["lf"] = it.nk ? Json("NK") : Json(it.lf_text);
    r["verdicts"] = Json::array();
    for (const auto& v : it.verdicts) {
      Json vj;
      vj["id"] = v.id;
      vj["strength"] = std::string(to_string(v.strength));
      vj["passed"] = v.passed;
      vj["feedback"] = v.feedback;
      if (v.back_translation) vj["back_translation"] = *v.back_translation;
      r["verdicts"].push_back(vj);
    }
    r["feedback"] = it.feedback;
    r["admitted"] = it.admitted;
    r["answer"] = it.answer ? answer_to_json(*it.answer) : Json(nullptr);
    j["iterations"].push_back(r);
  }
  j["candidates"] = t.candidate_iterations;
  Json c;
  c["branch"] = t.consensus.branch;
  c["pool_size"] = t.consensus.pool_size;
  c["supporters"] = t.consensus.supporters;
  c["threshold"] = t.consensus.threshold;
  c["selected_iteration"] = t.consensus.selected_iteration ? Json(*t.consensus.selected_iteration) : Json(nullptr);
  c["selection_fallback"] = t.consensus.selection_fallback;
  j["consensus"] = c;
  j["exchanges"] = Json::array();
  for (const auto& e : t.exchanges) j["exchanges"].push_back({{"purpose", e.purpose}, {"prompt", e.prompt}, {"reply", e.reply}});
  j["outcome"] = {{"lf", lf_to_json(outcome.lf)},
                  {"answer", optional_answer(outcome.answer)},
                  {"confident", outcome.confident},
                  {"error", outcome.error ? Json(*outcome.error) : Json(nullptr)}};
  return j;
}

}  // namespace kbqa
