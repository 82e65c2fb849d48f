// Copyright 2026 The dptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>

namespace dptext {

// One private text/label record.
struct PrivateExample {
  std::string text;
  std::string label;
};

enum class PromptKind { kPublic, kPrivate };

// Parameterized prompt with {label}, {text}, {field_name} and {keyword}
// slots. Public templates must not contain a {text} slot and must never be
// rendered with a private example: the public session is the one channel
// guaranteed to carry no private bytes.
class PromptTemplate {
 public:
  PromptTemplate(PromptKind kind, std::string body);

  // Instantiates the template. `label` fills {label}; the example's text
  // fills {text} (private templates only); {keyword} falls back to the
  // label when extras do not override it, matching label-conditioned
  // generation for slot-filling tasks. Missing slot values raise
  // TemplateError; a private example passed to a public template raises
  // PolicyError.
  std::string render(const std::string& label,
                     const std::optional<PrivateExample>& example,
                     const std::map<std::string, std::string>& extras) const;

  PromptKind kind() const { return kind_; }
  const std::string& body() const { return body_; }

 private:
  PromptKind kind_;
  std::string body_;
};

// Built-in template pairs for the supported generation tasks:
// "agnews", "dbpedia", "trec", "mit".
struct TemplateSet {
  PromptTemplate private_template;
  PromptTemplate public_template;
};

TemplateSet builtin_templates(const std::string& name);

}  // namespace dptext
