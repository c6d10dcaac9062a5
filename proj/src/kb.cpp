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

#include "kbqa/kb.hpp"

#include <algorithm>
#include <tuple>

#include "kbqa/error.hpp"

namespace kbqa {

namespace {

const std::vector<std::size_t> kNoFacts;
const std::set<std::string> kNoInstances;

}  // namespace

KnowledgeBase KnowledgeBase::build(std::vector<SchemaClass> classes, std::vector<RelationDef> relations,
                                   std::vector<Entity> entities, std::vector<Fact> facts,
                                   Tombstones tombstones) {
  KnowledgeBase kb;
  for (auto& c : classes) {
    if (c.id.empty()) throw ReferentialError("", "class with empty id");
    std::string id = c.id;
    if (!kb.classes_.emplace(id, std::move(c)).second)
      throw ReferentialError(id, "duplicate class id " + id);
  }
  for (auto& r : relations) {
    if (r.id.empty()) throw ReferentialError("", "relation with empty id");
    r.literal_range = literal_type_from_tag(r.range);
    if (!kb.classes_.count(r.domain))
      throw ReferentialError(r.domain, "relation " + r.id + " has unknown domain class " + r.domain);
    if (!r.literal_range && !kb.classes_.count(r.range))
      throw ReferentialError(r.range, "relation " + r.id + " has unknown range class " + r.range);
    if (kb.classes_.count(r.id)) throw ReferentialError(r.id, "id " + r.id + " names both a class and a relation");
    std::string id = r.id;
    if (!kb.relations_.emplace(id, std::move(r)).second)
      throw ReferentialError(id, "duplicate relation id " + id);
  }
  for (auto& e : entities) {
    if (e.id.empty()) throw ReferentialError("", "entity with empty id");
    for (const auto& c : e.classes)
      if (!kb.classes_.count(c)) throw ReferentialError(c, "entity " + e.id + " has unknown class " + c);
    if (kb.classes_.count(e.id) || kb.relations_.count(e.id))
      throw ReferentialError(e.id, "id " + e.id + " names both an entity and a schema element");
    std::string id = e.id;
    if (!kb.entities_.emplace(id, std::move(e)).second)
      throw ReferentialError(id, "duplicate entity id " + id);
  }
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  for (const auto& f : facts) {
    auto rel = kb.relations_.find(f.relation);
    if (rel == kb.relations_.end())
      throw ReferentialError(f.relation, "fact uses unknown relation " + f.relation);
    auto subj = kb.entities_.find(f.subject);
    if (subj == kb.entities_.end())
      throw ReferentialError(f.subject, "fact uses unknown subject entity " + f.subject);
    if (!subj->second.classes.count(rel->second.domain))
      throw ReferentialError(f.subject, "subject " + f.subject + " lacks class " + rel->second.domain +
                                            " required by relation " + f.relation);
    if (rel->second.literal_range) {
      if (!f.object.is_literal() || f.object.type != *rel->second.literal_range)
        throw ReferentialError(f.relation, "object of " + f.subject + " " + f.relation + " must be a " +
                                               rel->second.range + " literal");
    } else {
      if (!f.object.is_entity())
        throw ReferentialError(f.relation, "object of " + f.subject + " " + f.relation + " must be an entity");
      auto obj = kb.entities_.find(f.object.text);
      if (obj == kb.entities_.end())
        throw ReferentialError(f.object.text, "fact uses unknown object entity " + f.object.text);
      if (!obj->second.classes.count(rel->second.range))
        throw ReferentialError(f.object.text, "object " + f.object.text + " lacks class " + rel->second.range +
                                                  " required by relation " + f.relation);
    }
  }
  kb.facts_ = std::move(facts);
  kb.tombstones_ = std::move(tombstones);
  for (std::size_t i = 0; i < kb.facts_.size(); ++i) {
    const Fact& f = kb.facts_[i];
    kb.by_subject_[f.subject].push_back(i);
    kb.by_object_[f.object].push_back(i);
    kb.by_relation_[f.relation].push_back(i);
  }
  for (const auto& [id, e] : kb.entities_)
    for (const auto& c : e.classes) kb.instances_[c].insert(id);
  return kb;
}

bool KnowledgeBase::contains_fact(const Fact& fact) const {
  return std::binary_search(facts_.begin(), facts_.end(), fact);
}

const SchemaClass* KnowledgeBase::find_class(const std::string& id) const {
  auto it = classes_.find(id);
  return it == classes_.end() ? nullptr : &it->second;
}

const RelationDef* KnowledgeBase::find_relation(const std::string& id) const {
  auto it = relations_.find(id);
  return it == relations_.end() ? nullptr : &it->second;
}

const Entity* KnowledgeBase::find_entity(const std::string& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

std::optional<std::set<std::string>> KnowledgeBase::entity_classes(const std::string& id) const {
  if (const Entity* e = find_entity(id)) return e->classes;
  return std::nullopt;
}

std::optional<KnowledgeBase::Element> KnowledgeBase::lookup(const std::string& id) const {
  if (const auto* c = find_class(id)) return Element{*c};
  if (const auto* r = find_relation(id)) return Element{*r};
  if (const auto* e = find_entity(id)) return Element{*e};
  return std::nullopt;
}

const std::vector<std::size_t>& KnowledgeBase::by_subject(const std::string& entity) const {
  auto it = by_subject_.find(entity);
  return it == by_subject_.end() ? kNoFacts : it->second;
}

const std::vector<std::size_t>& KnowledgeBase::by_object(const Value& object) const {
  auto it = by_object_.find(object);
  return it == by_object_.end() ? kNoFacts : it->second;
}

const std::vector<std::size_t>& KnowledgeBase::by_relation(const std::string& relation) const {
  auto it = by_relation_.find(relation);
  return it == by_relation_.end() ? kNoFacts : it->second;
}

const std::set<std::string>& KnowledgeBase::instances(const std::string& class_id) const {
  auto it = instances_.find(class_id);
  return it == instances_.end() ? kNoInstances : it->second;
}

void KnowledgeBase::validate() const {
  std::vector<SchemaClass> cs;
  for (const auto& [id, c] : classes_) cs.push_back(c);
  std::vector<RelationDef> rs;
  for (const auto& [id, r] : relations_) rs.push_back(r);
  std::vector<Entity> es;
  for (const auto& [id, e] : entities_) es.push_back(e);
  KnowledgeBase rebuilt = build(cs, rs, es, facts_, tombstones_);
  if (rebuilt.by_subject_ != by_subject_ || rebuilt.by_object_ != by_object_ ||
      rebuilt.by_relation_ != by_relation_ || rebuilt.instances_ != instances_ || rebuilt.facts_ != facts_)
    throw Error("knowledge base indexes are inconsistent with its facts");
}

bool KnowledgeBase::operator==(const KnowledgeBase& other) const {
  return classes_ == other.classes_ && relations_ == other.relations_ && entities_ == other.entities_ &&
         facts_ == other.facts_ && tombstones_ == other.tombstones_;
}

// ---------------------------------------------------------------------------

KnowledgeBase delete_elements(const KnowledgeBase& kb, const DeletionPlan& plan) {
  Tombstones tomb = kb.tombstones();
  std::set<std::string> drop_classes, drop_relations, drop_entities;
  std::set<Fact> drop_facts;

  for (const auto& c : plan.classes) {
    if (kb.has_class(c)) drop_classes.insert(c);
    else if (!tomb.classes.count(c)) throw UnknownIdError(c);
  }
  for (const auto& r : plan.relations) {
    if (kb.has_relation(r)) drop_relations.insert(r);
    else if (!tomb.relations.count(r)) throw UnknownIdError(r);
  }
  for (const auto& e : plan.entities) {
    if (kb.has_entity(e)) drop_entities.insert(e);
    else if (!tomb.entities.count(e)) throw UnknownIdError(e);
  }
  for (const auto& f : plan.facts) {
    if (kb.contains_fact(f)) drop_facts.insert(f);
    else if (!tomb.facts.count(f))
      throw UnknownIdError("(" + f.subject + ", " + f.relation + ", " + to_display(f.object) + ")");
  }

  for (const auto& [id, r] : kb.relations())
    if (drop_classes.count(r.domain) || (!r.literal_range && drop_classes.count(r.range)))
      drop_relations.insert(id);

  std::vector<SchemaClass> classes;
  for (const auto& [id, c] : kb.classes())
    if (!drop_classes.count(id)) classes.push_back(c);
  std::vector<RelationDef> relations;
  for (const auto& [id, r] : kb.relations())
    if (!drop_relations.count(id)) relations.push_back(r);
  std::vector<Entity> entities;
  for (const auto& [id, e] : kb.entities()) {
    if (drop_entities.count(id)) continue;
    Entity copy = e;
    for (const auto& c : drop_classes) copy.classes.erase(c);
    entities.push_back(std::move(copy));
  }
  std::vector<Fact> facts;
  for (const auto& f : kb.facts()) {
    bool gone = drop_facts.count(f) || drop_relations.count(f.relation) || drop_entities.count(f.subject) ||
                (f.object.is_entity() && drop_entities.count(f.object.text));
    if (gone) tomb.facts.insert(f);
    else facts.push_back(f);
  }
  tomb.classes.insert(drop_classes.begin(), drop_classes.end());
  tomb.relations.insert(drop_relations.begin(), drop_relations.end());
  tomb.entities.insert(drop_entities.begin(), drop_entities.end());
  return KnowledgeBase::build(std::move(classes), std::move(relations), std::move(entities), std::move(facts),
                              std::move(tomb));
}

// ---------------------------------------------------------------------------

namespace {

struct Step {
  std::string relation;
  bool forward;
  auto operator<=>(const Step&) const = default;
};

struct PathKey {
  std::vector<std::string> relations;
  std::vector<bool> directions;
  std::string end_class;  // empty for the untyped variant

  auto tie() const { return std::tie(relations, directions, end_class); }
  bool operator<(const PathKey& o) const { return tie() < o.tie(); }
};

void walk(const KnowledgeBase& kb, const Value& node, std::size_t depth, std::size_t max_len,
          std::optional<std::size_t> came_by, std::vector<Step>& steps,
          std::map<std::vector<Step>, std::set<std::string>>& found) {
  if (depth == max_len || node.is_literal()) return;
  auto visit = [&](std::size_t fi, bool forward) {
    if (came_by && *came_by == fi) return;
    const Fact& f = kb.facts()[fi];
    Value next = forward ? f.object : Value::entity(f.subject);
    steps.push_back(Step{f.relation, forward});
    auto& classes = found[steps];
    if (next.is_entity())
      if (const Entity* e = kb.find_entity(next.text)) classes.insert(e->classes.begin(), e->classes.end());
    walk(kb, next, depth + 1, max_len, fi, steps, found);
    steps.pop_back();
  };
  for (std::size_t fi : kb.by_subject(node.text)) visit(fi, true);
  for (std::size_t fi : kb.by_object(node)) visit(fi, false);
}

}  // namespace

std::vector<CanonicalQuery> paths_from_entity(const KnowledgeBase& kb, const std::string& entity,
                                              std::size_t max_len) {
  if (!kb.has_entity(entity)) throw UnknownIdError(entity);
  if (max_len == 0) throw PreconditionError("max_len must be at least 1");
  std::map<std::vector<Step>, std::set<std::string>> found;
  std::vector<Step> steps;
  walk(kb, Value::entity(entity), 0, max_len, std::nullopt, steps, found);

  std::vector<std::pair<PathKey, CanonicalQuery>> out;
  for (const auto& [path, end_classes] : found) {
    CanonicalQuery q;
    q.projection = "x";
    Term prev = EntityRef{entity};
    for (std::size_t i = 0; i < path.size(); ++i) {
      Term next = i + 1 == path.size() ? Term{Variable{"x"}} : Term{Variable{"v" + std::to_string(i + 1)}};
      if (path[i].forward) q.patterns.push_back(TriplePattern{prev, RelationRef{path[i].relation}, next});
      else q.patterns.push_back(TriplePattern{next, RelationRef{path[i].relation}, prev});
      prev = next;
    }
    PathKey key;
    for (const auto& s : path) {
      key.relations.push_back(s.relation);
      key.directions.push_back(s.forward);
    }
    out.emplace_back(key, canonicalize(q));
    for (const auto& c : end_classes) {
      CanonicalQuery typed = q;
      typed.patterns.push_back(TriplePattern{Variable{"x"}, TypeMarker{}, ClassRef{c}});
      PathKey typed_key = key;
      typed_key.end_class = c;
      out.emplace_back(typed_key, canonicalize(typed));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CanonicalQuery> queries;
  for (auto& [key, q] : out) queries.push_back(std::move(q));
  return queries;
}

}  // namespace kbqa
