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

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kbqa/error.hpp"
#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"

namespace kbqa {

using json = Json;

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json& field(const json& obj, const char* key, const std::string& file, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(file, line, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& file, std::size_t line) {
  const json& v = field(obj, key, file, line);
  if (!v.is_string()) throw FormatError(file, line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Fact fact_from_json(const json& rec, const std::string& file, std::size_t line) {
  Fact f;
  f.subject = string_field(rec, "s", file, line);
  f.relation = string_field(rec, "r", file, line);
  try {
    f.object = value_from_json(field(rec, "o", file, line));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(file, line, e.what());
  }
  return f;
}

}  // namespace

KnowledgeBase load_kb(const std::filesystem::path& schema_file, const std::filesystem::path& data_file) {
  const std::string schema_name = schema_file.string();
  json schema;
  try {
    schema = json::parse(read_file(schema_file));
  } catch (const json::parse_error& e) {
    throw FormatError(schema_name, 0, e.what());
  }
  if (!schema.is_object()) throw FormatError(schema_name, 0, "schema must be a JSON object");

  std::vector<SchemaClass> classes;
  std::vector<RelationDef> relations;
  Tombstones tomb;
  try {
    for (const auto& c : schema.value("classes", json::array()))
      classes.push_back(SchemaClass{c.at("id").get<std::string>(), c.value("label", std::string())});
    for (const auto& r : schema.value("relations", json::array()))
      relations.push_back(RelationDef{r.at("id").get<std::string>(), r.at("domain").get<std::string>(),
                                      r.at("range").get<std::string>(), std::nullopt});
    if (auto d = schema.find("deleted"); d != schema.end()) {
      for (const auto& c : d->value("classes", json::array())) tomb.classes.insert(c.get<std::string>());
      for (const auto& r : d->value("relations", json::array())) tomb.relations.insert(r.get<std::string>());
      for (const auto& e : d->value("entities", json::array())) tomb.entities.insert(e.get<std::string>());
      for (const auto& f : d->value("facts", json::array())) tomb.facts.insert(fact_from_json(f, schema_name, 0));
    }
  } catch (const json::exception& e) {
    throw FormatError(schema_name, 0, e.what());
  }

  const std::string data_name = data_file.string();
  std::vector<Entity> entities;
  std::vector<Fact> facts;
  std::istringstream lines(read_file(data_file));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(data_name, n, e.what());
    }
    if (!rec.is_object()) throw FormatError(data_name, n, "record must be a JSON object");
    if (rec.contains("s")) {
      facts.push_back(fact_from_json(rec, data_name, n));
    } else if (rec.contains("id")) {
      Entity e;
      e.id = string_field(rec, "id", data_name, n);
      if (rec.contains("label")) e.label = string_field(rec, "label", data_name, n);
      const json& cs = rec.contains("classes") ? rec["classes"] : json::array();
      if (!cs.is_array()) throw FormatError(data_name, n, "field 'classes' must be a list");
      for (const auto& c : cs) {
        if (!c.is_string()) throw FormatError(data_name, n, "class ids must be strings");
        e.classes.insert(c.get<std::string>());
      }
      entities.push_back(std::move(e));
    } else {
      throw FormatError(data_name, n, "record is neither an entity nor a fact");
    }
  }
  return KnowledgeBase::build(std::move(classes), std::move(relations), std::move(entities), std::move(facts),
                              std::move(tomb));
}

KnowledgeBase load_kb_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError(dir.string(), 0, "KB directory does not exist");
  return load_kb(dir / "schema.json", dir / "data.jsonl");
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json schema;
  schema["classes"] = json::array();
  for (const auto& [id, c] : kb.classes()) schema["classes"].push_back({{"id", id}, {"label", c.label}});
  schema["relations"] = json::array();
  for (const auto& [id, r] : kb.relations())
    schema["relations"].push_back({{"id", id}, {"domain", r.domain}, {"range", r.range}});
  const Tombstones& t = kb.tombstones();
  if (!(t == Tombstones{})) {
    json d;
    d["classes"] = t.classes;
    d["relations"] = t.relations;
    d["entities"] = t.entities;
    d["facts"] = json::array();
    for (const auto& f : t.facts) d["facts"].push_back(fact_to_json(f));
    schema["deleted"] = d;
  }
  std::ofstream s(dir / "schema.json", std::ios::binary);
  s << schema.dump(2) << "\n";

  std::ofstream data(dir / "data.jsonl", std::ios::binary);
  for (const auto& [id, e] : kb.entities()) {
    json rec = {{"id", id}, {"label", e.label}, {"classes", e.classes}};
    data << rec.dump() << "\n";
  }
  for (const auto& f : kb.facts()) data << fact_to_json(f).dump() << "\n";
}

DeletionPlan load_deletion_plan(const std::filesystem::path& file) {
  const std::string name = file.string();
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw FormatError(name, 0, e.what());
  }
  DeletionPlan plan;
  try {
    plan.classes = j.value("classes", std::vector<std::string>{});
    plan.relations = j.value("relations", std::vector<std::string>{});
    plan.entities = j.value("entities", std::vector<std::string>{});
    for (const auto& f : j.value("facts", json::array())) plan.facts.push_back(fact_from_json(f, name, 0));
    plan.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw FormatError(name, 0, e.what());
  }
  return plan;
}

void save_deletion_plan(const DeletionPlan& plan, const std::filesystem::path& file) {
  json j;
  j["classes"] = plan.classes;
  j["relations"] = plan.relations;
  j["entities"] = plan.entities;
  j["facts"] = json::array();
  for (const auto& f : plan.facts) j["facts"].push_back(fact_to_json(f));
  j["seed"] = plan.seed;
  std::ofstream out(file, std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace kbqa
