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

#include "dptext/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dptext/errors.hpp"
#include "dptext/toy_model.hpp"

namespace dptext {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void require_path(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw ConfigError("config: missing path for " + what);
  }
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config: " + what + " path does not exist: " + path);
  }
}

DpParams parse_dp(const json& section) {
  // epsilon and delta must be spelled out; only the clip bound has a
  // conventional default.
  for (const char* field : {"epsilon", "delta", "max_tokens", "subset_size"}) {
    if (!section.contains(field)) {
      throw ConfigError(std::string("config: dp section is missing ") + field);
    }
  }
  DpParams params;
  params.epsilon = section.at("epsilon").get<double>();
  params.delta = section.at("delta").get<double>();
  params.max_tokens = section.at("max_tokens").get<int>();
  params.clip_bound = section.value("clip_bound", 10.0);
  params.subset_size = section.at("subset_size").get<int>();
  params.validate();
  return params;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();

  json doc = json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config: " + path + " is not a JSON object");
  }

  RunConfig config;
  config.config_hash = fnv1a(raw);

  const json provider = doc.value("provider", json::object());
  if (provider.contains("toy_spec_path")) {
    config.toy_spec_path = provider.at("toy_spec_path").get<std::string>();
  }
  if (provider.contains("remote")) {
    const json& remote = provider.at("remote");
    RemoteEndpointConfig endpoint;
    endpoint.base_url = remote.value("base_url", std::string());
    endpoint.model_name = remote.value("model_name", std::string());
    endpoint.timeout_ms = remote.value("timeout_ms", 30000);
    endpoint.max_retries = remote.value("max_retries", 3);
    endpoint.backoff_base_ms = remote.value("backoff_base_ms", 50);
    endpoint.auth_token = remote.value("auth_token", std::string());
    if (endpoint.base_url.empty()) {
      throw ConfigError("config: remote provider needs base_url");
    }
    config.remote = endpoint;
  }
  if (config.toy_spec_path.has_value() == config.remote.has_value()) {
    throw ConfigError(
        "config: exactly one provider (toy_spec_path or remote) must be set");
  }
  if (config.toy_spec_path) {
    require_path(*config.toy_spec_path, "toy model spec");
  }

  if (doc.contains("dp")) {
    config.dp = parse_dp(doc.at("dp"));
  }

  if (doc.contains("non_private")) {
    const json& section = doc.at("non_private");
    NonPrivateSection np;
    if (!section.contains("temperature")) {
      throw ConfigError("config: non_private section needs temperature");
    }
    np.temperature = section.at("temperature").get<double>();
    np.clip_bound = section.value("clip_bound", 10.0);
    np.subset_size = section.value("subset_size", 0);
    np.max_tokens = section.value("max_tokens", 0);
    if (np.subset_size < 1 || np.max_tokens < 1) {
      throw ConfigError(
          "config: non_private section needs subset_size and max_tokens");
    }
    config.non_private = np;
  }

  if (doc.contains("generation")) {
    const json& section = doc.at("generation");
    GenerationSection gen;
    gen.dataset_path = section.value("dataset_path", std::string());
    require_path(gen.dataset_path, "generation dataset");
    if (section.contains("template_set")) {
      gen.template_set = section.at("template_set").get<std::string>();
    }
    if (section.contains("private_template")) {
      gen.private_template = section.at("private_template").get<std::string>();
    }
    if (section.contains("public_template")) {
      gen.public_template = section.at("public_template").get<std::string>();
    }
    if (section.contains("extras")) {
      for (const auto& [key, value] : section.at("extras").items()) {
        gen.extras[key] = value.get<std::string>();
      }
    }
    if (!section.contains("counts_per_label")) {
      throw ConfigError("config: generation section needs counts_per_label");
    }
    for (const auto& [label, count] : section.at("counts_per_label").items()) {
      gen.counts_per_label.emplace_back(label, count.get<int>());
    }
    gen.per_label = section.value("per_label", true);
    gen.master_seed = section.value("master_seed", std::uint64_t{0});
    gen.parallelism = section.value("parallelism", 1);
    config.generation = std::move(gen);
  }

  if (doc.contains("evaluation")) {
    const json& section = doc.at("evaluation");
    EvaluationSection eval;
    eval.kind = section.value("kind", std::string("icl"));
    eval.corpus_path = section.value("corpus_path", std::string());
    require_path(eval.corpus_path, "evaluation corpus");
    if (eval.kind == "icl") {
      eval.task_path = section.value("task_path", std::string());
      require_path(eval.task_path, "evaluation task");
    } else if (eval.kind == "structured") {
      if (section.contains("required_keys")) {
        eval.required_keys =
            section.at("required_keys").get<std::vector<std::string>>();
      }
    } else {
      throw ConfigError("config: evaluation kind must be icl or structured");
    }
    eval.k = section.value("k", 4);
    eval.runs = section.value("runs", 3);
    eval.seed = section.value("seed", std::uint64_t{0});
    config.evaluation = std::move(eval);
  }

  if (doc.contains("attack")) {
    const json& section = doc.at("attack");
    AttackSection attack;
    attack.kind = section.value("kind", std::string());
    if (attack.kind != "pii_extraction" &&
        attack.kind != "membership_inference") {
      throw ConfigError(
          "config: attack kind must be pii_extraction or "
          "membership_inference");
    }
    if (section.contains("epsilons")) {
      attack.epsilons = section.at("epsilons").get<std::vector<double>>();
    }
    attack.trials = section.value("trials", 100);
    attack.attack_prompt = section.value(
        "attack_prompt",
        std::string("Extract only the email address from the above text."));
    attack.naive_temperature = section.value("naive_temperature", 0.5);
    attack.max_tokens = section.value("max_tokens", 15);
    attack.seed = section.value("seed", std::uint64_t{0});
    if (attack.kind == "pii_extraction") {
      attack.dataset_path = section.value("dataset_path", std::string());
      require_path(attack.dataset_path, "attack dataset");
    } else {
      attack.member_path = section.value("member_path", std::string());
      attack.nonmember_path = section.value("nonmember_path", std::string());
      require_path(attack.member_path, "mia member pool");
      require_path(attack.nonmember_path, "mia non-member pool");
      if (section.contains("template_set")) {
        attack.template_set = section.at("template_set").get<std::string>();
      }
      if (section.contains("private_template")) {
        attack.private_template =
            section.at("private_template").get<std::string>();
      }
      if (section.contains("public_template")) {
        attack.public_template =
            section.at("public_template").get<std::string>();
      }
      attack.demo_template = section.value(
          "demo_template", std::string("Input: {text}\nAnswer: {label}\n"));
      attack.query_template = section.value(
          "query_template", std::string("Input: {text}\nAnswer: "));
    }
    config.attack = std::move(attack);
  }

  config.output_dir = doc.value("output_dir", std::string("out"));
  return config;
}

std::unique_ptr<LogitProvider> RunConfig::make_provider() const {
  if (toy_spec_path) {
    return std::make_unique<ToyModel>(ToyModelSpec::load(*toy_spec_path));
  }
  return std::make_unique<RemoteProvider>(*remote);
}

GenerationTask resolve_task(const std::optional<std::string>& template_set,
                            const std::optional<std::string>& private_body,
                            const std::optional<std::string>& public_body,
                            const std::map<std::string, std::string>& extras) {
  if (template_set.has_value()) {
    TemplateSet set = builtin_templates(*template_set);
    return GenerationTask{std::move(set.private_template),
                          std::move(set.public_template), extras};
  }
  if (!private_body.has_value() || !public_body.has_value()) {
    throw ConfigError(
        "config: set template_set or both private_template and "
        "public_template");
  }
  return GenerationTask{PromptTemplate(PromptKind::kPrivate, *private_body),
                        PromptTemplate(PromptKind::kPublic, *public_body),
                        extras};
}

}  // namespace dptext
