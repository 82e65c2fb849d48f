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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dptext/pipeline.hpp"
#include "dptext/provider.hpp"

namespace dptext {

// Downstream task for k-shot in-context-learning evaluation.
// Classification predictions score by exact label match; extraction by
// exact slot-string match after whitespace normalization.
struct IclTask {
  enum class Kind { kClassification, kExtraction };

  std::string name;
  Kind kind = Kind::kClassification;
  std::vector<std::string> label_set;  // classification
  std::string slot_name;               // extraction
  std::vector<PrivateExample> test_examples;
  std::string prompt_header = "Classify the following examples:";

  // JSON task definition: {name, kind, labels|slot, test_path,
  // prompt_header}; test_path resolves relative to the task file.
  static IclTask load(const std::string& path);
};

// Percentages are reported at 0.1 resolution; the standard deviation is the
// sample deviation over runs (zero when runs == 1).
struct EvalReport {
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  int shots = 0;
  int runs = 0;
  std::vector<double> per_run;

  std::string to_text() const;
};

// Demonstration block in Input/Answer form followed by the query. Demo
// order follows the input order exactly, so prompts are byte-identical
// across runs given the same demos.
std::string build_icl_prompt(const std::string& header,
                             std::span<const SyntheticRecord> demos,
                             const std::string& query);

// Greedy answer for one query: the model decodes until a newline or <eos>
// (with a token cap as a hard stop), and the reply is trimmed at the first
// newline and of surrounding whitespace. Evaluation-time predictions are
// post-processing of DP outputs, so no noise is added.
std::string k_shot_predict(std::span<const SyntheticRecord> demos,
                           const std::string& query, LogitProvider& provider,
                           const std::string& header,
                           int max_answer_tokens = 32);

// For each run, samples k demonstrations from the corpus (equally many per
// label for classification, fully random for extraction), predicts every
// test example, and reports mean and sample standard deviation of the
// per-run accuracies. k = 0 is the zero-shot baseline and never touches the
// corpus.
EvalReport evaluate_icl(std::span<const SyntheticRecord> corpus,
                        const IclTask& task, int k, int runs,
                        std::uint64_t seed, LogitProvider& provider);

using SchemaValidator = std::function<bool(const nlohmann::json&)>;

// Structured-output quality: share of records whose text parses as JSON,
// share passing the schema check, and the raw sample count. The default
// schema accepts any object with at least one key.
struct StructuredEval {
  double parse_rate = 0.0;
  double validate_rate = 0.0;
  int raw_count = 0;
};

StructuredEval evaluate_structured(std::span<const SyntheticRecord> records,
                                   const SchemaValidator& validator = {});

}  // namespace dptext
