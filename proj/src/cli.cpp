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

#include "kbqa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kbqa/config.hpp"
#include "kbqa/dataset.hpp"
#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/metrics.hpp"
#include "kbqa/pipeline.hpp"
#include "kbqa/verifiers.hpp"

namespace kbqa {

namespace fs = std::filesystem;

namespace {

// Fatal errors that map to exit code 2.
class FatalError : public Error {
 public:
  using Error::Error;
};

void require_dir(const std::string& flag, const std::string& path) {
  if (!fs::is_directory(path)) throw FatalError(flag + ": directory not found: " + path);
}

void require_file(const std::string& flag, const std::string& path) {
  if (!fs::is_regular_file(path)) throw FatalError(flag + ": file not found: " + path);
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FatalError("cannot write " + file.string());
  out << text;
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Dialect parse_dialect(const std::string& flag, const std::string& name) {
  auto d = dialect_from_string(name);
  if (!d) throw FatalError(flag + ": unknown dialect '" + name + "'");
  return *d;
}

// ---------------------------------------------------------------------------

struct KbOptions {
  std::string kb;
  std::string plan;
  std::string out;
  DeletionCounts counts;
  std::uint64_t seed = 0;
};

int cmd_kb_validate(const KbOptions& o, std::ostream& out, std::ostream& err) {
  require_dir("--kb", o.kb);
  try {
    KnowledgeBase kb = load_kb_dir(o.kb);
    kb.validate();
    out << "ok: " << kb.classes().size() << " classes, " << kb.relations().size() << " relations, "
        << kb.entities().size() << " entities, " << kb.facts().size() << " facts\n";
    return kExitOk;
  } catch (const ReferentialError& e) {
    err << "invalid KB " << o.kb << ": " << e.what() << "\n";
    return kExitItemFailures;
  }
}

DeletionPlan plan_from_options(const KnowledgeBase& kb, const KbOptions& o) {
  if (!o.plan.empty()) {
    require_file("--plan", o.plan);
    return load_deletion_plan(o.plan);
  }
  return random_deletion_plan(kb, o.counts, o.seed);
}

int cmd_kb_delete(const KbOptions& o, std::ostream& out) {
  require_dir("--kb", o.kb);
  KnowledgeBase kb = load_kb_dir(o.kb);
  DeletionPlan plan = plan_from_options(kb, o);
  KnowledgeBase reduced = delete_elements(kb, plan);
  save_kb(reduced, o.out);
  save_deletion_plan(plan, fs::path(o.out) / "deletion_plan.json");
  out << "wrote " << o.out << ": " << reduced.entities().size() << " entities, " << reduced.facts().size()
      << " facts\n";
  return kExitOk;
}

struct DatasetOptions {
  KbOptions kb;
  std::string dataset;
  std::string out;
  std::string out_kb;
  std::size_t answerable = 0;
  std::size_t unanswerable = 0;
};

int cmd_dataset_inject(const DatasetOptions& o, std::ostream& out) {
  require_dir("--kb", o.kb.kb);
  require_file("--dataset", o.dataset);
  KnowledgeBase kb = load_kb_dir(o.kb.kb);
  DatasetSplit split = load_split(o.dataset);
  DeletionPlan plan = plan_from_options(kb, o.kb);
  auto [reduced, relabelled] = inject_unanswerability(kb, split, plan);
  save_kb(reduced, o.out_kb);
  save_deletion_plan(plan, fs::path(o.out_kb) / "deletion_plan.json");
  save_split(relabelled, o.out);
  std::map<std::string, std::size_t> counts;
  for (const auto& ex : relabelled.examples) ++counts[std::string(to_string(ex.label))];
  out << "wrote " << o.out << ":";
  for (const auto& [label, n] : counts) out << " " << label << "=" << n;
  out << "\n";
  return kExitOk;
}

int cmd_dataset_sample(const DatasetOptions& o, std::ostream& out) {
  require_file("--dataset", o.dataset);
  DatasetSplit split = load_split(o.dataset);
  DatasetSplit sample = sample_fewshots(split, o.answerable, o.unanswerable, o.kb.seed);
  save_split(sample, o.out);
  out << "wrote " << o.out << ": " << sample.examples.size() << " examples\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RunOptions {
  std::string config;
  std::string kb;
  std::string dataset;
  std::string backend;
  std::string mock;
  std::string out;
  std::string dialect;
  std::string fewshot;
  int n_iter = 0;
  bool answerable_mode = false;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig resolve_run_config(const RunOptions& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    require_file("--config", o.config);
    cfg = load_run_config(o.config);
  }
  if (!o.backend.empty()) cfg.backend = o.backend;
  if (!o.mock.empty()) {
    cfg.mock_fixture = o.mock;
    if (o.backend.empty()) cfg.backend = "mock";
  }
  if (o.n_iter > 0) cfg.n_iter = o.n_iter;
  if (o.answerable_mode) cfg.answerable_mode = true;
  if (o.workers > 0) cfg.workers = o.workers;
  if (!o.dialect.empty()) cfg.dialect = parse_dialect("--dialect", o.dialect);
  if (!o.fewshot.empty()) cfg.fewshot_file = o.fewshot;
  if (o.seed_set) cfg.seed = o.seed;
  if (cfg.backend == "mock") {
    if (!cfg.mock_fixture) throw FatalError("--mock: the mock backend needs a fixture file");
    require_file("--mock", cfg.mock_fixture->string());
  }
  if (cfg.fewshot_file) require_file("fewshot file", cfg.fewshot_file->string());
  if (cfg.templates_dir) require_dir("templates_dir", cfg.templates_dir->string());
  return cfg;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  require_dir("--kb", o.kb);
  require_file("--dataset", o.dataset);
  RunConfig cfg = resolve_run_config(o);
  auto started = std::chrono::steady_clock::now();
  std::string started_at = utc_now();

  KnowledgeBase kb = load_kb_dir(o.kb);
  DatasetSplit split = load_split(o.dataset);
  TemplateCatalog templates =
      cfg.templates_dir ? TemplateCatalog::with_overrides(*cfg.templates_dir) : TemplateCatalog::defaults();

  PipelineConfig pc;
  pc.fun.n = cfg.n_iter;
  pc.fun.answerable_mode = cfg.answerable_mode;
  pc.fun.mediator_classes = cfg.mediator_classes;
  pc.fun.dialect = cfg.dialect;
  pc.caps = cfg.caps;
  pc.templates = &templates;
  pc.workers = cfg.workers;
  if (cfg.fewshot_file) {
    DatasetSplit shots = load_split(*cfg.fewshot_file);
    if (cfg.fewshot_answerable + cfg.fewshot_unanswerable > 0)
      shots = sample_fewshots(shots, cfg.fewshot_answerable, cfg.fewshot_unanswerable, cfg.seed);
    pc.fewshots = shots.examples;
  }

  auto gateway = make_gateway(cfg);
  auto owned = make_retrievers(cfg);
  std::vector<const Retriever*> retrievers;
  for (const auto& r : owned) retrievers.push_back(r.get());

  std::vector<PipelineOutcome> outcomes = run_dataset(*gateway, kb, retrievers, split, pc);

  fs::path dir(o.out);
  fs::create_directories(dir / "traces");
  Json manifest;
  manifest["config"] = o.config.empty() ? Json(nullptr) : Json(o.config);
  manifest["kb"] = o.kb;
  manifest["dataset"] = o.dataset;
  manifest["backend"] = cfg.backend;
  manifest["mock"] = cfg.mock_fixture ? Json(cfg.mock_fixture->string()) : Json(nullptr);
  manifest["out"] = o.out;
  manifest["seed"] = cfg.seed;
  manifest["resolved_config"] = run_config_to_json(cfg);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  std::string lines;
  std::vector<Prediction> predictions;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& outcome = outcomes[i];
    lines += outcome_to_json(split.examples[i], outcome).dump() + "\n";
    char name[32];
    std::snprintf(name, sizeof name, "q%04zu.json", i);
    write_text(dir / "traces" / name, trace_to_json(outcome).dump(2) + "\n");
    Prediction p;
    p.question = split.examples[i].question;
    p.lf = outcome.lf;
    if (outcome.answer && !outcome.answer->empty()) p.answer = outcome.answer;
    predictions.push_back(std::move(p));
    if (outcome.error) ++failures;
  }
  write_text(dir / "outcomes.jsonl", lines);

  Report report = aggregate(evaluate_all(split.examples, predictions, &kb));
  write_text(dir / "report.json", report_to_json(report).dump(2) + "\n");
  std::string table = report_to_text(report);
  write_text(dir / "report.txt", table);

  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream log;
  log << "started " << started_at << "\n"
      << "finished " << utc_now() << "\n"
      << "duration_s " << std::fixed << std::setprecision(3) << seconds << "\n"
      << "questions " << outcomes.size() << "\n"
      << "errors " << failures << "\n"
      << "gateway_calls " << gateway->calls() << "\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i].error) log << "error q" << i << ": " << *outcomes[i].error << "\n";
  write_text(dir / "run.log", log.str());

  out << table;
  if (failures) out << failures << " question(s) ended with an error; see " << (dir / "run.log").string() << "\n";
  return failures ? kExitItemFailures : kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string pred;
  std::string gold;
  std::string kb;
  std::string out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  require_file("--pred", o.pred);
  require_file("--gold", o.gold);
  std::optional<KnowledgeBase> kb;
  if (!o.kb.empty()) {
    require_dir("--kb", o.kb);
    kb = load_kb_dir(o.kb);
  }
  DatasetSplit gold = load_split(o.gold);
  std::vector<Prediction> pred = load_predictions(o.pred);
  if (pred.size() != gold.examples.size())
    throw FatalError("--pred has " + std::to_string(pred.size()) + " records but --gold has " +
                     std::to_string(gold.examples.size()));
  auto records = evaluate_all(gold.examples, pred, kb ? &*kb : nullptr);
  Report report = aggregate(records);
  std::string table = report_to_text(report);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_text(fs::path(o.out) / "report.json", report_to_json(report).dump(2) + "\n");
    write_text(fs::path(o.out) / "report.txt", table);
    write_text(fs::path(o.out) / "records.csv", records_to_csv(records));
  }
  out << table;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string kb;
  std::string question;
  std::string lf;
  std::string dialect = "sparql";
  std::string entities;
  std::string mediators;
  std::string mock;
  bool answerable_mode = false;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  require_dir("--kb", o.kb);
  KnowledgeBase kb = load_kb_dir(o.kb);
  LogicalForm lf = LogicalForm::from_text(parse_dialect("--dialect", o.dialect), o.lf);
  const TemplateCatalog& templates = TemplateCatalog::defaults();
  auto ids = split_list(o.entities);
  auto mediator_list = split_list(o.mediators);
  std::set<std::string> entities(ids.begin(), ids.end());
  std::set<std::string> mediators(mediator_list.begin(), mediator_list.end());

  std::unique_ptr<GenerationGateway> gateway;
  if (!o.mock.empty()) {
    require_file("--mock", o.mock);
    gateway = MockGateway::from_file(o.mock);
  }
  const VerifierSuite suite = VerifierSuite::standard(o.answerable_mode);
  AnswerChecks checks = v4_answer_consistency(lf, kb, entities, mediators, o.answerable_mode, templates);
  bool executable = !lf.nk && lf.parsed();

  std::size_t failed = 0;
  auto report = [&](const Verdict& v) {
    out << v.id << " " << to_string(suite.strength_of(v.id)) << " " << (v.passed ? "pass" : "FAIL") << "\n";
    if (!v.passed) {
      ++failed;
      std::istringstream lines(v.feedback);
      std::string line;
      while (std::getline(lines, line)) out << "    " << line << "\n";
    }
    if (v.back_translation) out << "    back-translation: " << *v.back_translation << "\n";
  };
  std::vector<std::string> order = suite.strong;
  order.insert(order.end(), suite.weak.begin(), suite.weak.end());
  for (const auto& id : order) {
    using namespace verifier_id;
    if (id == kSyntax) report(v1_syntax(lf, templates));
    else if (id == kTypes) report(v2a_type_compatibility(lf, kb, templates));
    else if (id == kSchema) report(v2b_schema_presence(lf, kb, templates));
    else if (id == kCasting) report(v2c_literal_casting(lf, kb, templates));
    else if (id == kAnswerEntity) report(checks.answer_entity);
    else if (id == kIntermediate) report(checks.intermediate);
    else if (id == kEmptyAnswer) report(checks.empty_answer);
    else if (id == kAgreement) {
      if (!gateway) out << id << " " << to_string(suite.strength_of(id)) << " skipped (no --mock gateway)\n";
      else report(v3_question_lf_agreement(lf, o.question, *gateway, templates));
    }
  }
  if (executable) {
    out << "answer:";
    if (checks.answer.empty()) out << " (empty)";
    for (const auto& v : checks.answer) out << " " << to_display(v);
    out << "\n";
  }
  return failed ? kExitItemFailures : kExitOk;
}

// ---------------------------------------------------------------------------

std::string lf_text(const Json& lf) {
  if (lf.is_string()) return lf.get<std::string>();
  if (lf.is_object()) return lf.value("text", std::string());
  return lf.dump();
}

int cmd_trace_show(const std::string& file, bool prompts, std::ostream& out) {
  require_file("trace file", file);
  std::ifstream in(file, std::ios::binary);
  Json t;
  try {
    t = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(file, 0, e.what());
  }
  try {
    out << "question: " << t.at("question").get<std::string>() << "\n";
    for (const auto& it : t.at("iterations")) {
      out << "iteration " << it.at("iteration").get<int>() << ": " << lf_text(it.at("lf")) << "\n";
      for (const auto& v : it.at("verdicts")) {
        out << "  " << v.at("id").get<std::string>() << " " << v.at("strength").get<std::string>() << " "
            << (v.at("passed").get<bool>() ? "pass" : "FAIL") << "\n";
        if (v.contains("back_translation"))
          out << "      back-translation: " << v["back_translation"].get<std::string>() << "\n";
      }
      if (!it.at("feedback").empty()) out << "  feedback:\n";
      for (const auto& f : it.at("feedback")) {
        std::istringstream lines(f.get<std::string>());
        std::string line;
        while (std::getline(lines, line)) out << "    > " << line << "\n";
      }
      if (it.value("admitted", false)) out << "  admitted as candidate\n";
      if (!it.at("answer").is_null()) out << "  answer: " << it["answer"].dump() << "\n";
    }
    const Json& c = t.at("consensus");
    out << "consensus: " << c.at("branch").get<std::string>();
    if (c.at("branch") != "confident")
      out << " (pool " << c.at("pool_size").get<std::size_t>() << ", supporters " << c.at("supporters").get<std::size_t>()
          << ", threshold " << c.at("threshold").get<std::size_t>() << ")";
    out << "\n";
    const Json& o = t.at("outcome");
    out << "outcome: lf=" << lf_text(o.at("lf")) << " answer=" << o.at("answer").dump()
        << " confident=" << (o.at("confident").get<bool>() ? "yes" : "no") << "\n";
    if (!o.at("error").is_null()) out << "error: " << o["error"].get<std::string>() << "\n";
    if (prompts) {
      for (const auto& e : t.at("exchanges")) {
        out << "--- " << e.at("purpose").get<std::string>() << " prompt\n" << e.at("prompt").get<std::string>()
            << "\n--- reply\n" << e.at("reply").get<std::string>() << "\n";
      }
    } else {
      out << "exchanges: " << t.at("exchanges").size() << "\n";
    }
  } catch (const Json::exception& e) {
    throw FormatError(file, 0, std::string("not a trace file: ") + e.what());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-base question answering with unanswerability detection", "kbqa"};
  app.require_subcommand(1);
  std::function<int()> action;

  KbOptions kb_opts;
  auto* kb = app.add_subcommand("kb", "Validate or reduce a knowledge base");
  kb->require_subcommand(1);
  auto* kb_validate = kb->add_subcommand("validate", "Check referential integrity of a KB directory");
  kb_validate->add_option("--kb", kb_opts.kb, "KB directory (schema.json, data.jsonl)")->required();
  kb_validate->callback([&] { action = [&] { return cmd_kb_validate(kb_opts, out, err); }; });
  auto* kb_delete = kb->add_subcommand("delete", "Apply a deletion plan and write the reduced KB");
  kb_delete->add_option("--kb", kb_opts.kb, "KB directory")->required();
  kb_delete->add_option("--plan", kb_opts.plan, "Deletion plan JSON; omit to draw a random plan");
  kb_delete->add_option("--out", kb_opts.out, "Output KB directory")->required();
  kb_delete->add_option("--classes", kb_opts.counts.classes, "Random plan: classes to delete");
  kb_delete->add_option("--relations", kb_opts.counts.relations, "Random plan: relations to delete");
  kb_delete->add_option("--entities", kb_opts.counts.entities, "Random plan: entities to delete");
  kb_delete->add_option("--facts", kb_opts.counts.facts, "Random plan: facts to delete");
  kb_delete->add_option("--seed", kb_opts.seed, "Random plan seed");
  kb_delete->callback([&] { action = [&] { return cmd_kb_delete(kb_opts, out); }; });

  DatasetOptions ds_opts;
  auto* ds = app.add_subcommand("dataset", "Build and sample QA splits");
  ds->require_subcommand(1);
  auto* inject = ds->add_subcommand("inject", "Delete KB elements and relabel the split");
  inject->add_option("--kb", ds_opts.kb.kb, "Complete KB directory")->required();
  inject->add_option("--dataset", ds_opts.dataset, "Answerable split (JSON Lines)")->required();
  inject->add_option("--plan", ds_opts.kb.plan, "Deletion plan JSON; omit to draw a random plan");
  inject->add_option("--classes", ds_opts.kb.counts.classes, "Random plan: classes to delete");
  inject->add_option("--relations", ds_opts.kb.counts.relations, "Random plan: relations to delete");
  inject->add_option("--entities", ds_opts.kb.counts.entities, "Random plan: entities to delete");
  inject->add_option("--facts", ds_opts.kb.counts.facts, "Random plan: facts to delete");
  inject->add_option("--seed", ds_opts.kb.seed, "Random plan seed");
  inject->add_option("--out-kb", ds_opts.out_kb, "Reduced KB directory")->required();
  inject->add_option("--out", ds_opts.out, "Relabelled split")->required();
  inject->callback([&] { action = [&] { return cmd_dataset_inject(ds_opts, out); }; });
  auto* sample = ds->add_subcommand("sample", "Draw a stratified few-shot sample");
  sample->add_option("--dataset", ds_opts.dataset, "Source split")->required();
  sample->add_option("--answerable", ds_opts.answerable, "Answerable examples to draw");
  sample->add_option("--unanswerable", ds_opts.unanswerable, "Unanswerable examples to draw");
  sample->add_option("--seed", ds_opts.kb.seed, "Sampling seed");
  sample->add_option("--out", ds_opts.out, "Output split")->required();
  sample->callback([&] { action = [&] { return cmd_dataset_sample(ds_opts, out); }; });

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Answer every question of a split");
  run->add_option("--config", run_opts.config, "Run configuration JSON");
  run->add_option("--kb", run_opts.kb, "KB directory")->required();
  run->add_option("--dataset", run_opts.dataset, "Split to answer")->required();
  run->add_option("--backend", run_opts.backend, "Gateway backend")->check(CLI::IsMember({"mock", "http"}));
  run->add_option("--mock", run_opts.mock, "Mock fixture (implies --backend mock)");
  run->add_option("--n-iter", run_opts.n_iter, "Repair iterations")->check(CLI::PositiveNumber);
  run->add_flag("--answerable-mode", run_opts.answerable_mode, "Assume every question is answerable");
  run->add_option("--workers", run_opts.workers, "Parallel questions")->check(CLI::PositiveNumber);
  run->add_option("--dialect", run_opts.dialect, "Logical form dialect (sparql, sexpr)");
  run->add_option("--fewshot", run_opts.fewshot, "Few-shot exemplar split");
  auto* seed_opt = run->add_option("--seed", run_opts.seed, "Seed for few-shot sampling");
  run->add_option("--out", run_opts.out, "Output directory")->required();
  run->callback([&] {
    run_opts.seed_set = seed_opt->count() > 0;
    action = [&] { return cmd_run(run_opts, out); };
  });

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Score predictions against a gold split");
  eval->add_option("--pred", eval_opts.pred, "outcomes.jsonl from run")->required();
  eval->add_option("--gold", eval_opts.gold, "Gold split")->required();
  eval->add_option("--kb", eval_opts.kb, "KB to execute logical forms on; recorded answers otherwise");
  eval->add_option("--out", eval_opts.out, "Directory for report.json, report.txt, records.csv");
  eval->callback([&] { action = [&] { return cmd_eval(eval_opts, out); }; });

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run every verifier on one logical form");
  verify->add_option("--kb", verify_opts.kb, "KB directory")->required();
  verify->add_option("--question", verify_opts.question, "Natural-language question")->required();
  verify->add_option("--lf", verify_opts.lf, "Logical form text, or NK")->required();
  verify->add_option("--dialect", verify_opts.dialect, "sparql or sexpr");
  verify->add_option("--entities", verify_opts.entities, "Comma-separated question entity ids");
  verify->add_option("--mediators", verify_opts.mediators, "Comma-separated mediator class ids");
  verify->add_option("--mock", verify_opts.mock, "Mock fixture for the back-translation check");
  verify->add_flag("--answerable-mode", verify_opts.answerable_mode, "Treat an empty answer as a strong failure");
  verify->callback([&] { action = [&] { return cmd_verify(verify_opts, out); }; });

  std::string trace_file;
  bool trace_prompts = false;
  auto* trace = app.add_subcommand("trace", "Inspect run traces");
  trace->require_subcommand(1);
  auto* show = trace->add_subcommand("show", "Print a trace file");
  show->add_option("file", trace_file, "Trace JSON")->required();
  show->add_flag("--prompts", trace_prompts, "Include every prompt and reply");
  show->callback([&] { action = [&] { return cmd_trace_show(trace_file, trace_prompts, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) {
      failing = sub;
      for (const auto* inner : sub->get_subcommands()) failing = inner;
    }
    err << failing->help();
    return kExitFatal;
  }

  try {
    return action ? action() : kExitFatal;
  } catch (const FatalError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitFatal;
}

}  // namespace kbqa
