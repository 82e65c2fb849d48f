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
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dptext/accountant.hpp"
#include "dptext/pipeline.hpp"
#include "dptext/provider.hpp"
#include "dptext/remote_provider.hpp"

namespace dptext {

// Run configuration loaded from a JSON document. Exactly one provider must
// be configured, every referenced path must exist at load time, and the
// privacy parameters epsilon and delta are always explicit: there are no
// silent defaults for the budget. clip_bound defaults to 10 when omitted.
struct RunConfig {
  struct GenerationSection {
    std::string dataset_path;
    std::optional<std::string> template_set;
    std::optional<std::string> private_template;
    std::optional<std::string> public_template;
    std::map<std::string, std::string> extras;
    std::vector<std::pair<std::string, int>> counts_per_label;
    bool per_label = true;
    std::uint64_t master_seed = 0;
    int parallelism = 1;
  };

  // Explicit-temperature mode for the epsilon = infinity baselines. Used
  // only when the operator passes --non-private.
  struct NonPrivateSection {
    double temperature = 0.0;
    double clip_bound = 10.0;
    int subset_size = 0;
    int max_tokens = 0;
  };

  struct EvaluationSection {
    std::string kind = "icl";  // icl | structured
    std::string task_path;
    std::string corpus_path;
    int k = 4;
    int runs = 3;
    std::uint64_t seed = 0;
    std::vector<std::string> required_keys;  // structured schema check
  };

  struct AttackSection {
    std::string kind;  // pii_extraction | membership_inference
    std::vector<double> epsilons;
    int trials = 100;
    std::string attack_prompt;
    double naive_temperature = 0.5;
    int max_tokens = 15;
    std::string dataset_path;     // pii
    std::string member_path;      // mia
    std::string nonmember_path;   // mia
    std::optional<std::string> template_set;
    std::optional<std::string> private_template;
    std::optional<std::string> public_template;
    std::string demo_template;
    std::string query_template;
    std::uint64_t seed = 0;
  };

  std::optional<std::string> toy_spec_path;
  std::optional<RemoteEndpointConfig> remote;
  std::optional<DpParams> dp;
  std::optional<NonPrivateSection> non_private;
  std::optional<GenerationSection> generation;
  std::optional<EvaluationSection> evaluation;
  std::optional<AttackSection> attack;
  std::string output_dir = "out";

  std::uint64_t config_hash = 0;  // FNV-1a over the raw document bytes

  static RunConfig load(const std::string& path);

  std::unique_ptr<LogitProvider> make_provider() const;
};

// Resolves the prompt templates for a generation task: a builtin set name,
// or inline private/public bodies.
GenerationTask resolve_task(const std::optional<std::string>& template_set,
                            const std::optional<std::string>& private_body,
                            const std::optional<std::string>& public_body,
                            const std::map<std::string, std::string>& extras);

}  // namespace dptext
