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

#include "kbqa/dataset.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Answerable: return "answerable";
    case Label::SchemaUnanswerable: return "schema-unans";
    case Label::DataUnanswerable: return "data-unans";
  }
  return "answerable";
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::None: return "n/a";
    case Category::MissingClass: return "missing-class";
    case Category::MissingRelation: return "missing-relation";
    case Category::MissingTopicEntity: return "missing-topic-entity";
    case Category::MissingEntity: return "missing-entity";
    case Category::MissingFact: return "missing-fact";
  }
  return "n/a";
}

std::optional<Label> label_from_string(std::string_view s) {
  for (Label l : {Label::Answerable, Label::SchemaUnanswerable, Label::DataUnanswerable})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::optional<Category> category_from_string(std::string_view s) {
  for (Category c : {Category::None, Category::MissingClass, Category::MissingRelation, Category::MissingTopicEntity,
                     Category::MissingEntity, Category::MissingFact})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

void validate_example(const QAExample& ex) {
  if (ex.question.empty()) throw Error("question is empty");
  switch (ex.label) {
    case Label::Answerable:
      if (ex.gold_lf.nk) throw Error("answerable example has gold_lf NK");
      if (!ex.gold_answer) throw Error("answerable example has gold_answer NA");
      if (ex.category != Category::None) throw Error("answerable example must have category n/a");
      break;
    case Label::SchemaUnanswerable:
      if (!ex.gold_lf.nk) throw Error("schema-unans example must have gold_lf NK");
      if (ex.gold_answer) throw Error("schema-unans example must have gold_answer NA");
      if (ex.category != Category::MissingClass && ex.category != Category::MissingRelation &&
          ex.category != Category::MissingTopicEntity)
        throw Error("schema-unans example has category " + std::string(to_string(ex.category)));
      break;
    case Label::DataUnanswerable:
      if (ex.gold_lf.nk) throw Error("data-unans example has gold_lf NK");
      if (ex.gold_answer) throw Error("data-unans example must have gold_answer NA");
      if (ex.category != Category::MissingEntity && ex.category != Category::MissingFact)
        throw Error("data-unans example has category " + std::string(to_string(ex.category)));
      break;
  }
  if (!ex.gold_lf.nk && !ex.gold_lf.parsed())
    throw Error("gold_lf does not parse: " + ex.gold_lf.parse_error.value_or(""));
}

Json example_to_json(const QAExample& ex) {
  Json j;
  j["question"] = ex.question;
  j["linked_entities"] = Json::array();
  for (const auto& e : ex.linked_entities) j["linked_entities"].push_back({{"mention", e.mention}, {"id", e.id}});
  if (ex.gold_lf.nk) j["gold_lf"] = "NK";
  else j["gold_lf"] = {{"dialect", std::string(to_string(ex.gold_lf.dialect))}, {"text", ex.gold_lf.surface}};
  if (ex.gold_answer) j["gold_answer"] = answer_to_json(*ex.gold_answer);
  else j["gold_answer"] = "NA";
  j["complete_kb_answer"] = answer_to_json(ex.complete_kb_answer);
  j["label"] = std::string(to_string(ex.label));
  j["category"] = std::string(to_string(ex.category));
  return j;
}

QAExample example_from_json(const Json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  QAExample ex;
  try {
    ex.question = j.at("question").get<std::string>();
    for (const auto& e : j.value("linked_entities", Json::array()))
      ex.linked_entities.push_back(LinkedEntity{e.at("mention").get<std::string>(), e.at("id").get<std::string>()});
    const Json& lf = j.at("gold_lf");
    if (lf.is_string() && lf.get<std::string>() == "NK") {
      ex.gold_lf = LogicalForm::nk_sentinel();
    } else if (lf.is_object()) {
      auto d = dialect_from_string(lf.at("dialect").get<std::string>());
      if (!d) throw Error("unknown dialect '" + lf.at("dialect").get<std::string>() + "'");
      ex.gold_lf = LogicalForm::from_text(*d, lf.at("text").get<std::string>());
    } else {
      throw Error("gold_lf must be \"NK\" or {dialect, text}");
    }
    const Json& ans = j.at("gold_answer");
    if (ans.is_string() && ans.get<std::string>() == "NA") ex.gold_answer = std::nullopt;
    else ex.gold_answer = answer_from_json(ans);
    if (j.contains("complete_kb_answer")) ex.complete_kb_answer = answer_from_json(j["complete_kb_answer"]);
    std::string label = j.value("label", std::string("answerable"));
    auto l = label_from_string(label);
    if (!l) throw Error("unknown label '" + label + "'");
    ex.label = *l;
    std::string category = j.value("category", std::string("n/a"));
    auto c = category_from_string(category);
    if (!c) throw Error("unknown category '" + category + "'");
    ex.category = *c;
  } catch (const Json::exception& e) {
    throw Error(e.what());
  }
  validate_example(ex);
  return ex;
}

DatasetSplit load_split(const std::filesystem::path& file, std::string name) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "cannot open dataset file");
  DatasetSplit split;
  split.name = name.empty() ? file.stem().string() : std::move(name);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      split.examples.push_back(example_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw FormatError(file.string(), n, e.what());
    } catch (const Error& e) {
      throw FormatError(file.string(), n, e.what());
    }
  }
  return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError(file.string(), 0, "cannot write dataset file");
  for (const auto& ex : split.examples) out << example_to_json(ex).dump() << "\n";
}

// ---------------------------------------------------------------------------

std::pair<KnowledgeBase, DatasetSplit> inject_unanswerability(const KnowledgeBase& kb, const DatasetSplit& split,
                                                             const DeletionPlan& plan) {
  std::vector<AnswerSet> before;
  for (std::size_t i = 0; i < split.examples.size(); ++i) {
    const QAExample& ex = split.examples[i];
    if (ex.gold_lf.nk || !ex.gold_lf.parsed())
      throw PreconditionError("example " + std::to_string(i + 1) + " has no executable gold logical form");
    AnswerSet a = execute(kb, ex.gold_lf.query());
    if (a.empty()) throw PreconditionError("example " + std::to_string(i + 1) + " has an empty answer on the source KB");
    before.push_back(std::move(a));
  }

  KnowledgeBase reduced = delete_elements(kb, plan);
  auto deleted_entity = [&](const std::string& id) { return kb.has_entity(id) && !reduced.has_entity(id); };

  DatasetSplit out{split.name, {}};
  for (std::size_t i = 0; i < split.examples.size(); ++i) {
    QAExample ex = split.examples[i];
    const CanonicalQuery q = ex.gold_lf.query();
    ex.complete_kb_answer = before[i];

    bool missing_class = false, missing_relation = false, missing_topic = false;
    for (const auto& c : extract_classes(q)) missing_class |= kb.has_class(c) && !reduced.has_class(c);
    for (const auto& r : extract_relations(q)) missing_relation |= kb.has_relation(r) && !reduced.has_relation(r);
    for (const auto& e : ex.linked_entities) missing_topic |= deleted_entity(e.id);
    for (const auto& e : extract_entities(q)) missing_topic |= deleted_entity(e);

    if (missing_class || missing_relation || missing_topic) {
      ex.label = Label::SchemaUnanswerable;
      ex.category = missing_class ? Category::MissingClass
                    : missing_relation ? Category::MissingRelation
                                       : Category::MissingTopicEntity;
      ex.gold_lf = LogicalForm::nk_sentinel();
      ex.gold_answer = std::nullopt;
    } else if (AnswerSet after = execute(reduced, q); after.empty()) {
      bool entity_broke = false;
      for (const auto& b : solve(kb, q))
        for (const auto& [var, value] : b)
          if (value.is_entity() && deleted_entity(value.text)) entity_broke = true;
      ex.label = Label::DataUnanswerable;
      ex.category = entity_broke ? Category::MissingEntity : Category::MissingFact;
      ex.gold_answer = std::nullopt;
    } else {
      ex.label = Label::Answerable;
      ex.category = Category::None;
      ex.gold_answer = std::move(after);
    }
    out.examples.push_back(std::move(ex));
  }
  return {std::move(reduced), std::move(out)};
}

std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

DeletionPlan random_deletion_plan(const KnowledgeBase& kb, const DeletionCounts& counts, std::uint64_t seed) {
  DeletionPlan plan;
  plan.seed = seed;
  auto pick = [&](const auto& map, std::size_t k, std::uint64_t salt, std::vector<std::string>& out) {
    std::vector<std::string> ids;
    for (const auto& [id, v] : map) ids.push_back(id);
    for (std::size_t i : draw_without_replacement(ids.size(), k, seed ^ salt)) out.push_back(ids[i]);
  };
  pick(kb.classes(), counts.classes, 0x1, plan.classes);
  pick(kb.relations(), counts.relations, 0x2, plan.relations);
  pick(kb.entities(), counts.entities, 0x3, plan.entities);
  for (std::size_t i : draw_without_replacement(kb.facts().size(), counts.facts, seed ^ 0x4))
    plan.facts.push_back(kb.facts()[i]);
  return plan;
}

DatasetSplit sample_fewshots(const DatasetSplit& split, std::size_t n_answerable, std::size_t n_unanswerable,
                             std::uint64_t seed) {
  std::vector<std::size_t> answerable, unanswerable;
  for (std::size_t i = 0; i < split.examples.size(); ++i)
    (split.examples[i].unanswerable() ? unanswerable : answerable).push_back(i);
  if (answerable.size() < n_answerable)
    throw InsufficientExamplesError("need " + std::to_string(n_answerable) + " answerable examples, split has " +
                                    std::to_string(answerable.size()));
  if (unanswerable.size() < n_unanswerable)
    throw InsufficientExamplesError("need " + std::to_string(n_unanswerable) + " unanswerable examples, split has " +
                                    std::to_string(unanswerable.size()));
  DatasetSplit out{"fewshot", {}};
  for (std::size_t i : draw_without_replacement(answerable.size(), n_answerable, seed))
    out.examples.push_back(split.examples[answerable[i]]);
  for (std::size_t i : draw_without_replacement(unanswerable.size(), n_unanswerable, seed ^ 0x9e3779b97f4a7c15ULL))
    out.examples.push_back(split.examples[unanswerable[i]]);
  return out;
}

}  // namespace kbqa
