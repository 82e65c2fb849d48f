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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dptext/commands.hpp"
#include "dptext/errors.hpp"
#include "dptext/version.hpp"

namespace {

struct AuditFlags {
  std::string config_path;
  double epsilon = 0.0;
  double delta = 0.0;
  int max_tokens = 0;
  double clip_bound = 10.0;
  int subset_size = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private synthetic text generation"};
  app.set_version_flag("--version", dptext::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  dptext::GenerateOptions generate_options;
  double tau_flag = 0.0;
  std::uint64_t seed_flag = 0;
  std::string output_dir_flag;

  CLI::App* generate = app.add_subcommand(
      "generate", "generate a synthetic corpus from private data");
  generate->add_option("--config", config_path, "run configuration file")
      ->required();
  generate->add_flag("--non-private", generate_options.non_private,
                     "bypass the accountant and sample at an explicit "
                     "temperature (epsilon = infinity baseline)");
  CLI::Option* tau_opt = generate->add_option(
      "--tau", tau_flag, "explicit temperature for --non-private runs");
  CLI::Option* seed_opt = generate->add_option(
      "--master-seed", seed_flag, "override the configured master seed");
  CLI::Option* outdir_opt = generate->add_option(
      "--output-dir", output_dir_flag, "override the configured output dir");

  AuditFlags audit_flags;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "print the privacy accountant report for a budget");
  audit_cmd->add_option("--config", audit_flags.config_path,
                        "read the budget from a config file's dp section");
  audit_cmd->add_option("--epsilon", audit_flags.epsilon, "total epsilon");
  audit_cmd->add_option("--delta", audit_flags.delta, "delta in (0,1]");
  audit_cmd->add_option("--max-tokens", audit_flags.max_tokens,
                        "tokens per generation (T)");
  audit_cmd->add_option("--clip-bound", audit_flags.clip_bound,
                        "logit clip bound (c)");
  audit_cmd->add_option("--subset-size", audit_flags.subset_size,
                        "private subset size (s)");

  std::string evaluate_config;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score a synthetic corpus on a downstream task");
  evaluate->add_option("--config", evaluate_config, "run configuration file")
      ->required();

  std::string attack_config;
  CLI::App* attack = app.add_subcommand(
      "attack", "run an empirical privacy attack against the pipeline");
  attack->add_option("--config", attack_config, "run configuration file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      if (*tau_opt) {
        generate_options.temperature = tau_flag;
      }
      if (generate_options.temperature && !generate_options.non_private) {
        throw dptext::ConfigError(
            "--tau only applies together with --non-private");
      }
      if (*seed_opt) {
        generate_options.master_seed = seed_flag;
      }
      if (*outdir_opt) {
        generate_options.output_dir = output_dir_flag;
      }
      dptext::cmd_generate(dptext::RunConfig::load(config_path),
                           generate_options, std::cout);
    } else if (*audit_cmd) {
      dptext::DpParams params;
      if (!audit_flags.config_path.empty()) {
        dptext::RunConfig config =
            dptext::RunConfig::load(audit_flags.config_path);
        if (!config.dp.has_value()) {
          throw dptext::ConfigError("audit: config has no dp section");
        }
        params = *config.dp;
      } else {
        params.epsilon = audit_flags.epsilon;
        params.delta = audit_flags.delta;
        params.max_tokens = audit_flags.max_tokens;
        params.clip_bound = audit_flags.clip_bound;
        params.subset_size = audit_flags.subset_size;
      }
      dptext::cmd_audit(params, std::cout);
    } else if (*evaluate) {
      dptext::cmd_evaluate(dptext::RunConfig::load(evaluate_config),
                           std::cout);
    } else if (*attack) {
      dptext::cmd_attack(dptext::RunConfig::load(attack_config), std::cout);
    }
  } catch (const dptext::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
