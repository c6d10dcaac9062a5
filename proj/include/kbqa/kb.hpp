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

// Immutable in-memory knowledge base: schema (classes, relations) plus
// entities and facts, with subject/object/relation indexes.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kbqa/query.hpp"
#include "kbqa/value.hpp"

namespace kbqa {

struct SchemaClass {
  std::string id;
  std::string label;
  bool operator==(const SchemaClass&) const = default;
};

struct RelationDef {
  std::string id;
  std::string domain;
  std::string range;  // class id or literal tag
  std::optional<LiteralType> literal_range;  // set when range is a literal tag

  bool operator==(const RelationDef&) const = default;
};

struct Entity {
  std::string id;
  std::string label;
  std::set<std::string> classes;
  bool operator==(const Entity&) const = default;
};

struct Fact {
  std::string subject;
  std::string relation;
  Value object;
  auto operator<=>(const Fact&) const = default;
};

// Ids removed by earlier deletions. Deleting one of these again is a no-op.
struct Tombstones {
  std::set<std::string> classes;
  std::set<std::string> relations;
  std::set<std::string> entities;
  std::set<Fact> facts;
  bool operator==(const Tombstones&) const = default;
};

struct DeletionPlan {
  std::vector<std::string> classes;
  std::vector<std::string> relations;
  std::vector<std::string> entities;
  std::vector<Fact> facts;
  std::uint64_t seed = 0;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Validates every referential invariant and builds the indexes.
  // Throws ReferentialError naming the first dangling id.
  static KnowledgeBase build(std::vector<SchemaClass> classes, std::vector<RelationDef> relations,
                             std::vector<Entity> entities, std::vector<Fact> facts,
                             Tombstones tombstones = {});

  const std::map<std::string, SchemaClass>& classes() const { return classes_; }
  const std::map<std::string, RelationDef>& relations() const { return relations_; }
  const std::map<std::string, Entity>& entities() const { return entities_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const Tombstones& tombstones() const { return tombstones_; }

  bool has_class(const std::string& id) const { return classes_.count(id) > 0; }
  bool has_relation(const std::string& id) const { return relations_.count(id) > 0; }
  bool has_entity(const std::string& id) const { return entities_.count(id) > 0; }
  bool contains_fact(const Fact& fact) const;

  const SchemaClass* find_class(const std::string& id) const;
  const RelationDef* find_relation(const std::string& id) const;
  const Entity* find_entity(const std::string& id) const;
  std::optional<std::set<std::string>> entity_classes(const std::string& id) const;

  using Element = std::variant<SchemaClass, RelationDef, Entity>;
  // Total: absent ids yield nullopt.
  std::optional<Element> lookup(const std::string& id) const;

  // Index accessors; positions into facts(). Absent keys give an empty list.
  const std::vector<std::size_t>& by_subject(const std::string& entity) const;
  const std::vector<std::size_t>& by_object(const Value& object) const;
  const std::vector<std::size_t>& by_relation(const std::string& relation) const;
  const std::set<std::string>& instances(const std::string& class_id) const;

  // Re-runs the full invariant check, including index consistency.
  void validate() const;

  bool operator==(const KnowledgeBase& other) const;

 private:
  std::map<std::string, SchemaClass> classes_;
  std::map<std::string, RelationDef> relations_;
  std::map<std::string, Entity> entities_;
  std::vector<Fact> facts_;  // sorted, unique
  Tombstones tombstones_;

  std::map<std::string, std::vector<std::size_t>> by_subject_;
  std::map<Value, std::vector<std::size_t>> by_object_;
  std::map<std::string, std::vector<std::size_t>> by_relation_;
  std::map<std::string, std::set<std::string>> instances_;
};

// Returns a new KB with the plan applied and its cascades: a class takes its
// dependent relations and its membership in entity class sets; a relation
// takes its facts; an entity takes every fact mentioning it. Throws
// UnknownIdError for ids the KB never held.
KnowledgeBase delete_elements(const KnowledgeBase& kb, const DeletionPlan& plan);

// Chain queries rooted at `entity` of length 1..max_len, following facts in
// either direction, each with a non-empty answer on kb. A path ending at an
// entity is also emitted once per class of that end entity with a type
// assertion on the answer variable. Throws UnknownIdError.
std::vector<CanonicalQuery> paths_from_entity(const KnowledgeBase& kb, const std::string& entity,
                                              std::size_t max_len = 2);

// --- file formats ---------------------------------------------------------

KnowledgeBase load_kb(const std::filesystem::path& schema_file, const std::filesystem::path& data_file);
// Reads schema.json and data.jsonl from a directory.
KnowledgeBase load_kb_dir(const std::filesystem::path& dir);
// Writes schema.json and data.jsonl (entities first, then facts, sorted).
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir);

DeletionPlan load_deletion_plan(const std::filesystem::path& file);
void save_deletion_plan(const DeletionPlan& plan, const std::filesystem::path& file);

}  // namespace kbqa
