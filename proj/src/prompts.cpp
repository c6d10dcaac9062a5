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

#include "kbqa/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kbqa/error.hpp"

namespace kbqa {

namespace detail {
const std::map<std::string, std::string>& embedded_templates();
}

namespace {

std::string strip_one_newline(std::string text) {
  if (!text.empty() && text.back() == '\n') text.pop_back();
  if (!text.empty() && text.back() == '\r') text.pop_back();
  return text;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the placeholder starting at text[i] == '{', or 0.
std::size_t placeholder_at(const std::string& text, std::size_t i) {
  std::size_t j = i + 1;
  if (j >= text.size() || !ident_start(text[j])) return 0;
  while (j < text.size() && ident_char(text[j])) ++j;
  if (j >= text.size() || text[j] != '}') return 0;
  return j - i + 1;
}

template <typename OnText, typename OnName>
void scan(const std::string& text, OnText on_text, OnName on_name) {
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      on_text(std::string(1, c));
      i += 2;
      continue;
    }
    if (c == '{') {
      if (std::size_t n = placeholder_at(text, i)) {
        on_name(text.substr(i + 1, n - 2));
        i += n;
        continue;
      }
    }
    on_text(std::string(1, c));
    ++i;
  }
}

}  // namespace

std::string render_template(const std::string& id, const std::string& text,
                            const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(text.size());
  scan(
      text, [&](const std::string& s) { out += s; },
      [&](const std::string& name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw UnboundPlaceholderError(id, name);
        out += it->second;
      });
  return out;
}

const TemplateCatalog& TemplateCatalog::defaults() {
  static const TemplateCatalog catalog = [] {
    TemplateCatalog c;
    for (const auto& [id, text] : detail::embedded_templates()) c.set(id, text);
    return c;
  }();
  return catalog;
}

TemplateCatalog TemplateCatalog::with_overrides(const std::filesystem::path& dir) {
  TemplateCatalog c = defaults();
  if (!std::filesystem::is_directory(dir)) throw FormatError(dir.string(), 0, "template directory does not exist");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    c.set(entry.path().stem().string(), buf.str());
  }
  return c;
}

const std::string& TemplateCatalog::text(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw UnknownTemplateError(id);
  return it->second;
}

std::vector<std::string> TemplateCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

std::string TemplateCatalog::render(const std::string& id, const std::map<std::string, std::string>& bindings) const {
  return render_template(id, text(id), bindings);
}

std::vector<std::string> TemplateCatalog::placeholders(const std::string& id) const {
  std::vector<std::string> out;
  scan(
      text(id), [](const std::string&) {},
      [&](const std::string& name) {
        for (const auto& n : out)
          if (n == name) return;
        out.push_back(name);
      });
  return out;
}

void TemplateCatalog::set(const std::string& id, std::string text) { templates_[id] = strip_one_newline(std::move(text)); }

}  // namespace kbqa
