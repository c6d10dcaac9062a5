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

#include "kbqa/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {

Prediction prediction_from_json(const Json& j) {
  if (!j.is_object()) throw Error("prediction must be a JSON object");
  Prediction p;
  try {
    p.question = j.value("question", std::string());
    const Json& lf = j.at("lf");
    if (lf.is_string() && lf.get<std::string>() == "NK") {
      p.lf = LogicalForm::nk_sentinel();
    } else if (lf.is_object()) {
      auto d = dialect_from_string(lf.at("dialect").get<std::string>());
      if (!d) throw Error("unknown dialect '" + lf.at("dialect").get<std::string>() + "'");
      p.lf = LogicalForm::from_text(*d, lf.at("text").get<std::string>());
    } else {
      throw Error("lf must be \"NK\" or {dialect, text}");
    }
    const Json& ans = j.at("answer");
    if (ans.is_string() && ans.get<std::string>() == "NA") {
      p.answer = std::nullopt;
    } else {
      AnswerSet a = answer_from_json(ans);
      if (!a.empty()) p.answer = std::move(a);
    }
  } catch (const Json::exception& e) {
    throw Error(e.what());
  }
  return p;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "cannot open predictions file");
  std::vector<Prediction> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(prediction_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw FormatError(file.string(), n, e.what());
    } catch (const Error& e) {
      throw FormatError(file.string(), n, e.what());
    }
  }
  return out;
}

namespace {

// Shared NK and parse handling; nullopt means the structural checks passed
// and the answers decide.
std::optional<int> em_s_prefix(const LogicalForm& pred, const LogicalForm& gold) {
  if (pred.nk || gold.nk) return (pred.nk && gold.nk) ? 1 : 0;
  if (!pred.parsed() || !gold.parsed()) return 0;
  if (extract_relations(pred) != extract_relations(gold)) return 0;
  if (extract_entities(pred) != extract_entities(gold)) return 0;
  return std::nullopt;
}

}  // namespace

int em_s(const LogicalForm& pred, const LogicalForm& gold, const KnowledgeBase& kb) {
  if (auto r = em_s_prefix(pred, gold)) return *r;
  try {
    return execute(kb, pred.query()) == execute(kb, gold.query()) ? 1 : 0;
  } catch (const Error&) {
    return 0;
  }
}

int em_s_given_answers(const LogicalForm& pred, const LogicalForm& gold, const std::optional<AnswerSet>& pred_answer,
                       const std::optional<AnswerSet>& gold_answer) {
  if (auto r = em_s_prefix(pred, gold)) return *r;
  return pred_answer.value_or(AnswerSet{}) == gold_answer.value_or(AnswerSet{}) ? 1 : 0;
}

double set_f1(const AnswerSet& pred, const AnswerSet& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& v : pred) hits += gold.count(v);
  if (hits == 0) return 0.0;
  double p = static_cast<double>(hits) / static_cast<double>(pred.size());
  double r = static_cast<double>(hits) / static_cast<double>(gold.size());
  return 2 * p * r / (p + r);
}

double f1_answers(const std::optional<AnswerSet>& pred, const std::optional<AnswerSet>& gold,
                  const AnswerSet& complete_kb_answer, bool lenient) {
  double regular;
  if (!pred && !gold) regular = 1.0;
  else if (!pred || !gold) regular = 0.0;
  else regular = set_f1(*pred, *gold);
  if (lenient && pred && !complete_kb_answer.empty() && *pred == complete_kb_answer) return 1.0;
  return regular;
}

EvaluationRecord evaluate(std::size_t index, const QAExample& example, const Prediction& prediction,
                          const KnowledgeBase* kb) {
  EvaluationRecord r;
  r.index = index;
  r.question = example.question;
  r.label = example.label;
  r.category = example.category;
  r.parse_fail = !prediction.lf.nk && !prediction.lf.parsed();
  r.em_s = kb ? em_s(prediction.lf, example.gold_lf, *kb)
              : em_s_given_answers(prediction.lf, example.gold_lf, prediction.answer, example.gold_answer);
  r.f1_r = f1_answers(prediction.answer, example.gold_answer, example.complete_kb_answer, false);
  r.f1_l = f1_answers(prediction.answer, example.gold_answer, example.complete_kb_answer, true);
  return r;
}

std::vector<EvaluationRecord> evaluate_all(const std::vector<QAExample>& examples,
                                           const std::vector<Prediction>& predictions, const KnowledgeBase* kb) {
  if (examples.size() != predictions.size())
    throw Error("prediction count " + std::to_string(predictions.size()) + " does not match gold count " +
                std::to_string(examples.size()));
  std::vector<EvaluationRecord> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) out.push_back(evaluate(i, examples[i], predictions[i], kb));
  return out;
}

// ---------------------------------------------------------------------------

const SliceMetrics& Report::slice(const std::string& name) const {
  for (const auto& s : slices)
    if (s.name == name) return s;
  throw Error("no report slice named " + name);
}

namespace {

struct Accumulator {
  std::size_t n = 0;
  double f1_r = 0, f1_l = 0, em = 0;

  void add(const EvaluationRecord& r) {
    ++n;
    f1_r += r.f1_r;
    f1_l += r.f1_l;
    em += r.em_s;
  }

  SliceMetrics finish(std::string name) const {
    SliceMetrics s;
    s.name = std::move(name);
    s.count = n;
    if (n > 0) {
      double d = static_cast<double>(n);
      s.f1_r = 100.0 * f1_r / d;
      s.f1_l = 100.0 * f1_l / d;
      s.em_s = 100.0 * em / d;
    }
    return s;
  }
};

const Category kCategories[] = {Category::MissingClass, Category::MissingRelation, Category::MissingTopicEntity,
                                 Category::MissingEntity, Category::MissingFact};

std::string fixed1(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Json metric(const std::optional<double>& v) { return v ? Json(*v) : Json("n/a"); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Report aggregate(const std::vector<EvaluationRecord>& records) {
  Accumulator overall, answerable, unanswerable, schema, data;
  std::map<Category, Accumulator> by_category;
  for (const auto& r : records) {
    overall.add(r);
    switch (r.label) {
      case Label::Answerable: answerable.add(r); break;
      case Label::SchemaUnanswerable:
        unanswerable.add(r);
        schema.add(r);
        break;
      case Label::DataUnanswerable:
        unanswerable.add(r);
        data.add(r);
        break;
    }
    if (r.category != Category::None) by_category[r.category].add(r);
  }
  Report report;
  report.total = records.size();
  report.slices = {overall.finish("overall"), answerable.finish("answerable"), unanswerable.finish("unanswerable"),
                   schema.finish("schema-level"), data.finish("data-level")};
  for (Category c : kCategories) report.slices.push_back(by_category[c].finish(std::string(to_string(c))));
  return report;
}

Json report_to_json(const Report& report) {
  Json j;
  j["total"] = report.total;
  Json slices = Json::object();
  for (const auto& s : report.slices)
    slices[s.name] = {{"count", s.count}, {"f1_r", metric(s.f1_r)}, {"f1_l", metric(s.f1_l)}, {"em_s", metric(s.em_s)}};
  j["slices"] = slices;
  return j;
}

std::string report_to_text(const Report& report) {
  std::vector<std::vector<std::string>> rows = {{"slice", "n", "F1(R)", "F1(L)", "EM-s"}};
  for (const auto& s : report.slices)
    rows.push_back({s.name, std::to_string(s.count), fixed1(s.f1_r), fixed1(s.f1_l), fixed1(s.em_s)});
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string records_to_csv(const std::vector<EvaluationRecord>& records) {
  std::string out = "index,question,label,category,em_s,f1_r,f1_l,parse_fail\n";
  for (const auto& r : records) {
    out += std::to_string(r.index) + "," + csv_field(r.question) + "," + std::string(to_string(r.label)) + "," +
           std::string(to_string(r.category)) + "," + std::to_string(r.em_s) + "," + fixed4(r.f1_r) + "," +
           fixed4(r.f1_l) + "," + (r.parse_fail ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace kbqa
