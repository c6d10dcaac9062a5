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

#include "kbqa/config.hpp"

#include <fstream>

#include "kbqa/error.hpp"

namespace kbqa {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& source,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw FormatError(source, 0, "unknown key '" + where + key + "'");
  }
}

}  // namespace

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir, const std::string& source) {
  if (!j.is_object()) throw FormatError(source, 0, "config must be a JSON object");
  reject_unknown(j,
                 {"n_iter", "answerable_mode", "dialect", "caps", "mediator_classes", "retrievers", "fewshot",
                  "templates_dir", "gateway", "seed", "workers"},
                 source, "");
  RunConfig c;
  try {
    c.n_iter = j.value("n_iter", c.n_iter);
    if (c.n_iter < 1) throw FormatError(source, 0, "n_iter must be at least 1");
    c.answerable_mode = j.value("answerable_mode", c.answerable_mode);
    if (j.contains("dialect")) {
      auto d = dialect_from_string(j["dialect"].get<std::string>());
      if (!d) throw FormatError(source, 0, "unknown dialect '" + j["dialect"].get<std::string>() + "'");
      c.dialect = *d;
    }
    if (j.contains("caps")) {
      const Json& caps = j["caps"];
      reject_unknown(caps, {"classes", "relations", "paths"}, source, "caps.");
      c.caps.classes = caps.value("classes", c.caps.classes);
      c.caps.relations = caps.value("relations", c.caps.relations);
      c.caps.paths = caps.value("paths", c.caps.paths);
    }
    for (const auto& m : j.value("mediator_classes", Json::array())) c.mediator_classes.insert(m.get<std::string>());
    if (j.contains("retrievers")) {
      c.retrievers.clear();
      for (const auto& r : j["retrievers"]) {
        reject_unknown(r, {"kind", "command"}, source, "retrievers.");
        RetrieverSpec spec;
        spec.kind = r.value("kind", spec.kind);
        spec.command = r.value("command", std::string());
        if (spec.kind != "lexical" && spec.kind != "command")
          throw FormatError(source, 0, "unknown retriever kind '" + spec.kind + "'");
        if (spec.kind == "command" && spec.command.empty())
          throw FormatError(source, 0, "command retriever needs a 'command'");
        c.retrievers.push_back(spec);
      }
    }
    if (j.contains("fewshot")) {
      const Json& f = j["fewshot"];
      reject_unknown(f, {"file", "answerable", "unanswerable"}, source, "fewshot.");
      if (f.contains("file")) c.fewshot_file = resolve(base_dir, f["file"].get<std::string>());
      c.fewshot_answerable = f.value("answerable", c.fewshot_answerable);
      c.fewshot_unanswerable = f.value("unanswerable", c.fewshot_unanswerable);
    }
    if (j.contains("templates_dir")) c.templates_dir = resolve(base_dir, j["templates_dir"].get<std::string>());
    if (j.contains("gateway")) {
      const Json& g = j["gateway"];
      reject_unknown(g,
                     {"backend", "mock", "endpoint", "model", "token_env", "temperature", "max_retries",
                      "timeout_ms", "backoff_ms", "max_concurrency"},
                     source, "gateway.");
      c.backend = g.value("backend", c.backend);
      if (c.backend != "mock" && c.backend != "http")
        throw FormatError(source, 0, "unknown gateway backend '" + c.backend + "'");
      if (g.contains("mock")) c.mock_fixture = resolve(base_dir, g["mock"].get<std::string>());
      c.http.endpoint = g.value("endpoint", c.http.endpoint);
      c.http.model = g.value("model", c.http.model);
      c.http.token_env = g.value("token_env", c.http.token_env);
      c.http.temperature = g.value("temperature", c.http.temperature);
      c.http.max_retries = g.value("max_retries", c.http.max_retries);
      c.http.timeout = std::chrono::milliseconds(g.value("timeout_ms", static_cast<std::int64_t>(c.http.timeout.count())));
      c.http.backoff_base =
          std::chrono::milliseconds(g.value("backoff_ms", static_cast<std::int64_t>(c.http.backoff_base.count())));
      c.http.max_concurrency = g.value("max_concurrency", c.http.max_concurrency);
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (c.workers < 1) throw FormatError(source, 0, "workers must be at least 1");
  } catch (const Json::exception& e) {
    throw FormatError(source, 0, e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "cannot open config file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(file.string(), 0, e.what());
  }
  return run_config_from_json(j, file.parent_path(), file.string());
}

Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["n_iter"] = c.n_iter;
  j["answerable_mode"] = c.answerable_mode;
  j["dialect"] = std::string(to_string(c.dialect));
  j["caps"] = {{"classes", c.caps.classes}, {"relations", c.caps.relations}, {"paths", c.caps.paths}};
  j["mediator_classes"] = c.mediator_classes;
  j["retrievers"] = Json::array();
  for (const auto& r : c.retrievers) {
    Json rj = {{"kind", r.kind}};
    if (r.kind == "command") rj["command"] = r.command;
    j["retrievers"].push_back(rj);
  }
  if (c.fewshot_file)
    j["fewshot"] = {{"file", c.fewshot_file->string()},
                    {"answerable", c.fewshot_answerable},
                    {"unanswerable", c.fewshot_unanswerable}};
  if (c.templates_dir) j["templates_dir"] = c.templates_dir->string();
  Json g = {{"backend", c.backend}};
  if (c.backend == "mock") {
    if (c.mock_fixture) g["mock"] = c.mock_fixture->string();
  } else {
    g["endpoint"] = c.http.endpoint;
    g["model"] = c.http.model;
    g["token_env"] = c.http.token_env;
    g["temperature"] = c.http.temperature;
    g["max_retries"] = c.http.max_retries;
    g["timeout_ms"] = c.http.timeout.count();
    g["backoff_ms"] = c.http.backoff_base.count();
    g["max_concurrency"] = c.http.max_concurrency;
  }
  j["gateway"] = g;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

std::unique_ptr<GenerationGateway> make_gateway(const RunConfig& cfg) {
  if (cfg.backend == "mock") {
    if (!cfg.mock_fixture) throw PreconditionError("mock backend needs a fixture (--mock)");
    return MockGateway::from_file(*cfg.mock_fixture);
  }
  return std::make_unique<HttpGateway>(cfg.http);
}

std::vector<std::unique_ptr<Retriever>> make_retrievers(const RunConfig& cfg) {
  std::vector<std::unique_ptr<Retriever>> out;
  for (const auto& r : cfg.retrievers) {
    if (r.kind == "command") out.push_back(std::make_unique<CommandRetriever>(r.command, cfg.caps));
    else out.push_back(std::make_unique<LexicalRetriever>(cfg.caps));
  }
  return out;
}

}  // namespace kbqa
