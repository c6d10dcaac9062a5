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

// Prompt and feedback template catalog. Templates are plain text with
// `{name}` placeholders; `{{` and `}}` produce literal braces. A brace not
// followed by an identifier and `}` is literal text.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kbqa {

class TemplateCatalog {
 public:
  // The catalog compiled into the library.
  static const TemplateCatalog& defaults();

  // Defaults overlaid with every *.txt file in `dir` (id = file stem).
  static TemplateCatalog with_overrides(const std::filesystem::path& dir);

  bool has(const std::string& id) const { return templates_.count(id) > 0; }
  // Throws UnknownTemplateError.
  const std::string& text(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Throws UnknownTemplateError or UnboundPlaceholderError naming the first
  // unbound placeholder. Extra bindings are ignored.
  std::string render(const std::string& id, const std::map<std::string, std::string>& bindings) const;

  // Placeholder names in order of first appearance.
  std::vector<std::string> placeholders(const std::string& id) const;

  void set(const std::string& id, std::string text);

 private:
  std::map<std::string, std::string> templates_;
};

// Renders a raw template string; `id` only labels errors.
std::string render_template(const std::string& id, const std::string& text,
                            const std::map<std::string, std::string>& bindings);

}  // namespace kbqa
