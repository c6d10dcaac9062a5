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

#include "kbqa/retrieval.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unistd.h>

#include "kbqa/error.hpp"
#include "kbqa/executor.hpp"

namespace kbqa {

std::string relation_signature(const RelationDef& r) {
  return r.id + " (type:" + r.domain + " R type:" + r.range + ")";
}

std::string render_path_compact(const CanonicalQuery& q) {
  std::vector<const TriplePattern*> ordered;
  std::vector<bool> used(q.patterns.size(), false);
  std::set<std::string> reached;  // term strings already on the chain
  for (const auto& p : q.patterns)
    for (const Term* t : {&p.subject, &p.object})
      if (std::holds_alternative<EntityRef>(*t)) reached.insert(term_to_string(*t));
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
      const auto& p = q.patterns[i];
      if (used[i] || std::holds_alternative<TypeMarker>(p.predicate)) continue;
      if (reached.count(term_to_string(p.subject)) || reached.count(term_to_string(p.object))) {
        used[i] = true;
        ordered.push_back(&p);
        reached.insert(term_to_string(p.subject));
        reached.insert(term_to_string(p.object));
        progress = true;
      }
    }
  }
  for (std::size_t i = 0; i < q.patterns.size(); ++i)
    if (!used[i] && !std::holds_alternative<TypeMarker>(q.patterns[i].predicate)) ordered.push_back(&q.patterns[i]);
  for (const auto& p : q.patterns)
    if (std::holds_alternative<TypeMarker>(p.predicate)) ordered.push_back(&p);

  std::map<std::string, std::string> names{{q.projection, "x"}};
  std::size_t next = 0;
  auto term = [&](const Term& t) -> std::string {
    if (const auto* v = std::get_if<Variable>(&t)) {
      auto it = names.find(v->name);
      if (it == names.end()) it = names.emplace(v->name, "x" + std::to_string(next++)).first;
      return "?" + it->second;
    }
    if (const auto* l = std::get_if<Literal>(&t)) return term_to_string(Term{*l});
    return "ns:" + term_to_string(t);
  };
  std::string out = "SELECT DISTINCT ?xWHERE {";
  for (const auto* p : ordered) out += term(p->subject) + " " + term(p->predicate) + " " + term(p->object) + " .";
  return out + "}";
}

// ---------------------------------------------------------------------------

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",     "an",   "the",  "of",   "in",    "on",   "at",    "to",   "for",  "by",    "with", "from",
      "and",   "or",   "is",   "are",  "was",   "were", "be",    "been", "what", "which", "who",  "whom",
      "whose", "when", "where", "how", "that",  "this", "these", "those", "did", "does",  "do",   "has",
      "have",  "had",  "it",   "its",  "as",    "type", "object", "name", "all", "there", "many", "much"};
  return words;
}

std::set<std::string> trigrams(const std::vector<std::string>& tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) {
    std::string padded = "#" + t + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) out.insert(padded.substr(i, 3));
  }
  return out;
}

template <typename T>
void append_unique(std::vector<T>& out, const T& item) {
  if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
}

}  // namespace

std::vector<std::string> content_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (cur.size() > 3 && cur.back() == 's' && cur[cur.size() - 2] != 's') cur.pop_back();
    if (!stopwords().count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else flush();
  }
  flush();
  return out;
}

double LexicalRetriever::score(const std::string& question, const std::string& text) {
  auto q = content_tokens(question);
  auto t = content_tokens(text);
  std::set<std::string> qs(q.begin(), q.end()), ts(t.begin(), t.end());
  std::size_t overlap = 0;
  for (const auto& w : qs) overlap += ts.count(w);
  if (overlap == 0) return 0.0;
  auto qg = trigrams(q), tg = trigrams(t);
  std::size_t inter = 0;
  for (const auto& g : qg) inter += tg.count(g);
  std::size_t uni = qg.size() + tg.size() - inter;
  return static_cast<double>(overlap) + (uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0);
}

RetrievalContext LexicalRetriever::retrieve(const KnowledgeBase& kb, const std::string& question,
                                            const std::vector<LinkedEntity>& linked) const {
  RetrievalContext ctx;
  ctx.linked_entities = linked;

  auto rank = [&](std::vector<std::pair<double, std::string>>& scored, std::size_t cap) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> ids;
    for (const auto& [s, id] : scored)
      if (ids.size() < cap) ids.push_back(id);
    return ids;
  };

  std::vector<std::pair<double, std::string>> class_scores;
  for (const auto& [id, c] : kb.classes())
    if (double s = score(question, id + " " + c.label); s > 0) class_scores.emplace_back(s, id);
  ctx.classes = rank(class_scores, caps_.classes);

  std::map<std::string, double> relation_score;
  std::vector<std::pair<double, std::string>> rel_scores;
  for (const auto& [id, r] : kb.relations()) {
    double s = score(question, id);
    relation_score[id] = s;
    if (s > 0) rel_scores.emplace_back(s, id);
  }
  for (const auto& id : rank(rel_scores, caps_.relations))
    ctx.relations.push_back(RelationEntry{id, relation_signature(*kb.find_relation(id))});

  std::vector<std::pair<double, CanonicalQuery>> paths;
  for (const auto& e : linked) {
    if (!kb.has_entity(e.id)) continue;
    for (auto& p : paths_from_entity(kb, e.id, 2)) {
      double s = 0;
      for (const auto& r : extract_relations(p)) s += relation_score[r];
      paths.emplace_back(s, std::move(p));
    }
  }
  std::stable_sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [s, p] : paths) {
    if (ctx.paths.size() >= caps_.paths) break;
    append_unique(ctx.paths, p);
  }
  return ctx;
}

// ---------------------------------------------------------------------------

Json context_to_json(const RetrievalContext& ctx) {
  Json j;
  j["classes"] = ctx.classes;
  j["relations"] = Json::array();
  for (const auto& r : ctx.relations) j["relations"].push_back({{"id", r.id}, {"signature", r.signature}});
  j["paths"] = Json::array();
  for (const auto& p : ctx.paths) j["paths"].push_back(render_sparql(p));
  j["linked_entities"] = Json::array();
  for (const auto& e : ctx.linked_entities) j["linked_entities"].push_back({{"mention", e.mention}, {"id", e.id}});
  return j;
}

RetrievalContext context_from_json(const Json& j, const KnowledgeBase& kb, const RetrievalCaps& caps) {
  RetrievalContext ctx;
  try {
    for (const auto& c : j.value("classes", Json::array())) {
      std::string id = c.get<std::string>();
      if (kb.has_class(id) && ctx.classes.size() < caps.classes) append_unique(ctx.classes, id);
    }
    for (const auto& r : j.value("relations", Json::array())) {
      std::string id = r.is_string() ? r.get<std::string>() : r.at("id").get<std::string>();
      const RelationDef* def = kb.find_relation(id);
      if (def && ctx.relations.size() < caps.relations)
        append_unique(ctx.relations, RelationEntry{id, relation_signature(*def)});
    }
    for (const auto& p : j.value("paths", Json::array())) {
      if (ctx.paths.size() >= caps.paths) break;
      std::string text = p.is_string() ? p.get<std::string>() : p.at("text").get<std::string>();
      Dialect d = Dialect::Sparql;
      if (p.is_object() && p.contains("dialect"))
        d = dialect_from_string(p["dialect"].get<std::string>()).value_or(Dialect::Sparql);
      try {
        CanonicalQuery q = parse_query(d, text);
        if (!execute(kb, q).empty()) append_unique(ctx.paths, q);
      } catch (const SyntaxError&) {
      }
    }
    for (const auto& e : j.value("linked_entities", Json::array()))
      ctx.linked_entities.push_back(LinkedEntity{e.at("mention").get<std::string>(), e.at("id").get<std::string>()});
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed retrieval context: ") + e.what());
  }
  return ctx;
}

RetrievalContext CommandRetriever::retrieve(const KnowledgeBase& kb, const std::string& question,
                                            const std::vector<LinkedEntity>& linked) const {
  Json request;
  request["question"] = question;
  request["linked_entities"] = Json::array();
  for (const auto& e : linked) request["linked_entities"].push_back({{"mention", e.mention}, {"id", e.id}});

  char path[] = "/tmp/kbqa-retrieval-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) throw Error("cannot create a temporary file for the retriever request");
  close(fd);
  {
    std::ofstream out(path, std::ios::binary);
    out << request.dump();
  }
  std::string cmd = command_ + " < '" + std::string(path) + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::remove(path);
    throw Error("cannot run retriever command: " + command_);
  }
  std::string output;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), n);
  int status = pclose(pipe);
  std::remove(path);
  if (status != 0) throw Error("retriever command failed: " + command_);
  Json reply;
  try {
    reply = Json::parse(output);
  } catch (const Json::parse_error& e) {
    throw Error("retriever command returned invalid JSON: " + std::string(e.what()));
  }
  RetrievalContext ctx = context_from_json(reply, kb, caps_);
  if (ctx.linked_entities.empty()) ctx.linked_entities = linked;
  return ctx;
}

RetrievalContext retrieve_union(const std::vector<const Retriever*>& retrievers, const KnowledgeBase& kb,
                                const std::string& question, const std::vector<LinkedEntity>& linked,
                                const RetrievalCaps& caps) {
  if (retrievers.empty()) throw PreconditionError("retrieve_union needs at least one retriever");
  RetrievalContext out;
  for (const Retriever* r : retrievers) {
    RetrievalContext ctx = r->retrieve(kb, question, linked);
    for (const auto& c : ctx.classes) append_unique(out.classes, c);
    for (const auto& rel : ctx.relations) append_unique(out.relations, rel);
    for (const auto& p : ctx.paths) append_unique(out.paths, p);
    for (const auto& e : ctx.linked_entities) append_unique(out.linked_entities, e);
  }
  if (out.classes.size() > caps.classes) out.classes.resize(caps.classes);
  if (out.relations.size() > caps.relations) out.relations.resize(caps.relations);
  if (out.paths.size() > caps.paths) out.paths.resize(caps.paths);
  return out;
}

}  // namespace kbqa
