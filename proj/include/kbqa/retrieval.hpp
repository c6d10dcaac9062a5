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

// Retrieval context for generation: ranked classes, relations and
// entity-rooted paths, from one or more retrievers.

#include <memory>
#include <string>
#include <vector>

#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"
#include "kbqa/query.hpp"

namespace kbqa {

struct LinkedEntity {
  std::string mention;
  std::string id;
  bool operator==(const LinkedEntity&) const = default;
};

struct RelationEntry {
  std::string id;
  std::string signature;  // "id (type:domain R type:range)"
  bool operator==(const RelationEntry&) const = default;
};

struct RetrievalCaps {
  std::size_t classes = 10;
  std::size_t relations = 10;
  std::size_t paths = 5;
};

struct RetrievalContext {
  std::vector<std::string> classes;
  std::vector<RelationEntry> relations;
  std::vector<CanonicalQuery> paths;
  std::vector<LinkedEntity> linked_entities;

  bool operator==(const RetrievalContext&) const = default;
};

std::string relation_signature(const RelationDef& relation);

// Paths in the compact prompt form, e.g.
// SELECT DISTINCT ?xWHERE {ns:m.1 ns:r ?x0 .?x0 ns:s ?x .}
std::string render_path_compact(const CanonicalQuery& path);

Json context_to_json(const RetrievalContext& ctx);
// Drops ids unknown to `kb` and paths that do not parse or execute empty.
RetrievalContext context_from_json(const Json& j, const KnowledgeBase& kb, const RetrievalCaps& caps);

class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual RetrievalContext retrieve(const KnowledgeBase& kb, const std::string& question,
                                    const std::vector<LinkedEntity>& linked) const = 0;
};

// Scores schema elements by token overlap plus character-trigram similarity
// between the question and each element's id and label. Elements sharing no
// token with the question are not returned. Ties go to the smaller id.
class LexicalRetriever : public Retriever {
 public:
  explicit LexicalRetriever(RetrievalCaps caps = {}) : caps_(caps) {}
  RetrievalContext retrieve(const KnowledgeBase& kb, const std::string& question,
                            const std::vector<LinkedEntity>& linked) const override;

  // Similarity score used for ranking; 0 when no token is shared.
  static double score(const std::string& question, const std::string& text);

 private:
  RetrievalCaps caps_;
};

// Runs an external command with the request JSON on stdin and reads a
// context JSON from stdout.
class CommandRetriever : public Retriever {
 public:
  CommandRetriever(std::string command, RetrievalCaps caps = {}) : command_(std::move(command)), caps_(caps) {}
  RetrievalContext retrieve(const KnowledgeBase& kb, const std::string& question,
                            const std::vector<LinkedEntity>& linked) const override;

 private:
  std::string command_;
  RetrievalCaps caps_;
};

// Per-field union in retriever order, first occurrence wins, then capped.
RetrievalContext retrieve_union(const std::vector<const Retriever*>& retrievers, const KnowledgeBase& kb,
                                const std::string& question, const std::vector<LinkedEntity>& linked,
                                const RetrievalCaps& caps = {});

// Lowercased content tokens: split on non-alphanumerics, stopwords removed,
// a plural "s" stripped.
std::vector<std::string> content_tokens(const std::string& text);

}  // namespace kbqa
