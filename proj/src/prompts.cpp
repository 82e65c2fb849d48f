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

#include "dptext/prompts.hpp"

#include "dptext/errors.hpp"

namespace dptext {

namespace {

constexpr const char* kAgnewsPublic =
    "#[User]\n"
    "Generate only a text of news type {label}.\n"
    "\n"
    "#[Assistant]\n"
    "Text:";

constexpr const char* kAgnewsPrivate =
    "Here are texts with News Type: {label}.\n"
    "\n"
    "{text}\n"
    "\n"
    "Please give me another one.\n"
    "\n"
    "# [Assistant]\n"
    "Text:";

constexpr const char* kDbpediaPublic =
    "#[User]\n"
    "Generate only a wiki entry of Category {label}.\n"
    "\n"
    "#[Assistant]\n"
    "Text:";

constexpr const char* kDbpediaPrivate =
    "# [User] \n"
    "Here are entries of Category: {label}.\n"
    "\n"
    "{text}\n"
    "\n"
    "Please give me another one.\n"
    "\n"
    "# [Assistant]\n"
    "Entry:";

constexpr const char* kTrecPublic =
    "#[User]\n"
    "Generate only a question with Answer Type {label}.\n"
    "\n"
    "#[Assistant]\n"
    "Question:";

constexpr const char* kTrecPrivate =
    "# [User] \n"
    "Here are questions with Answer Type: {label}.\n"
    "\n"
    "{text}\n"
    "\n"
    "Please give me another one.\n"
    "\n"
    "# [Assistant]\n"
    "Question:";

constexpr const char* kMitPublic =
    "#[User]\n"
    "Give me text about a film and the extracted Phrase about its "
    "{field_name}. IMPORTANT: The exact {field_name} phrase \"{keyword}\" "
    "must be mentioned in Text.\n"
    "\n"
    "# [Assistant]\n"
    "Phrase: \"{keyword}\"\n"
    "Text: \"";

constexpr const char* kMitPrivate =
    "# [User] \n"
    "Give me text about a film and the extracted Phrase about its "
    "{field_name}.\n"
    "{text}\n"
    "\n"
    "Please give me another Phrase and Text. IMPORTANT: The exact "
    "{field_name} phrase \"{keyword}\" must be mentioned in Text.\n"
    "\n"
    "# [Assistant]\n"
    "Phrase: \"{keyword}\"\n"
    "Text: \"";

bool contains_slot(const std::string& body, const std::string& slot) {
  return body.find("{" + slot + "}") != std::string::npos;
}

}  // namespace

PromptTemplate::PromptTemplate(PromptKind kind, std::string body)
    : kind_(kind), body_(std::move(body)) {
  if (kind_ == PromptKind::kPublic && contains_slot(body_, "text")) {
    throw PolicyError(
        "public prompt templates must not contain a {text} slot");
  }
}

std::string PromptTemplate::render(
    const std::string& label, const std::optional<PrivateExample>& example,
    const std::map<std::string, std::string>& extras) const {
  if (kind_ == PromptKind::kPublic && example.has_value()) {
    throw PolicyError("private example passed to a public prompt template");
  }

  std::string out = body_;
  std::size_t pos = 0;
  while ((pos = out.find('{', pos)) != std::string::npos) {
    const auto close = out.find('}', pos);
    if (close == std::string::npos) {
      break;  // unmatched brace stays literal
    }
    const std::string slot = out.substr(pos + 1, close - pos - 1);
    std::string value;
    if (slot == "label") {
      value = label;
    } else if (slot == "text") {
      if (!example.has_value()) {
        throw TemplateError("template needs {text} but no example was given");
      }
      value = example->text;
    } else if (auto it = extras.find(slot); it != extras.end()) {
      value = it->second;
    } else if (slot == "keyword") {
      value = label;  // slot-filling tasks condition on the label phrase
    } else {
      throw TemplateError("no value for template slot {" + slot + "}");
    }
    out.replace(pos, close - pos + 1, value);
    pos += value.size();
  }
  return out;
}

TemplateSet builtin_templates(const std::string& name) {
  if (name == "agnews") {
    return {PromptTemplate(PromptKind::kPrivate, kAgnewsPrivate),
            PromptTemplate(PromptKind::kPublic, kAgnewsPublic)};
  }
  if (name == "dbpedia") {
    return {PromptTemplate(PromptKind::kPrivate, kDbpediaPrivate),
            PromptTemplate(PromptKind::kPublic, kDbpediaPublic)};
  }
  if (name == "trec") {
    return {PromptTemplate(PromptKind::kPrivate, kTrecPrivate),
            PromptTemplate(PromptKind::kPublic, kTrecPublic)};
  }
  if (name == "mit") {
    return {PromptTemplate(PromptKind::kPrivate, kMitPrivate),
            PromptTemplate(PromptKind::kPublic, kMitPublic)};
  }
  throw ConfigError("unknown builtin template set '" + name + "'");
}

}  // namespace dptext
