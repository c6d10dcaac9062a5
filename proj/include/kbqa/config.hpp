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

// Run configuration read from a JSON file; CLI flags override its fields.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kbqa/gateway.hpp"
#include "kbqa/json_io.hpp"
#include "kbqa/pipeline.hpp"
#include "kbqa/retrieval.hpp"

namespace kbqa {

struct RetrieverSpec {
  std::string kind = "lexical";  // lexical | command
  std::string command;
};

struct RunConfig {
  int n_iter = 4;
  bool answerable_mode = false;
  Dialect dialect = Dialect::Sparql;
  RetrievalCaps caps;
  std::set<std::string> mediator_classes;
  std::vector<RetrieverSpec> retrievers{RetrieverSpec{}};

  std::optional<std::filesystem::path> fewshot_file;
  std::size_t fewshot_answerable = 0;  // 0 with a file means use every example as given
  std::size_t fewshot_unanswerable = 0;
  std::optional<std::filesystem::path> templates_dir;

  std::string backend = "mock";  // mock | http
  std::optional<std::filesystem::path> mock_fixture;
  HttpConfig http;

  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Relative paths resolve against the config file's directory. Unknown keys
// are rejected. Throws FormatError naming the file.
RunConfig load_run_config(const std::filesystem::path& file);
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir, const std::string& source);
Json run_config_to_json(const RunConfig& cfg);

std::unique_ptr<GenerationGateway> make_gateway(const RunConfig& cfg);
std::vector<std::unique_ptr<Retriever>> make_retrievers(const RunConfig& cfg);

}  // namespace kbqa
