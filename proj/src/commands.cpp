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

#include "dptext/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dptext/attack.hpp"
#include "dptext/errors.hpp"
#include "dptext/eval.hpp"
#include "dptext/version.hpp"

namespace dptext {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json report_json(const AccountantReport& report) {
  return json{{"epsilon", report.params.epsilon},
              {"delta", report.params.delta},
              {"max_tokens", report.params.max_tokens},
              {"clip_bound", report.params.clip_bound},
              {"subset_size", report.params.subset_size},
              {"sensitivity", report.derived.sensitivity},
              {"temperature", report.derived.temperature},
              {"per_token_epsilon", report.derived.per_token_epsilon},
              {"composed_simplified", report.composed.simplified},
              {"composed_full", report.composed.full}};
}

void write_json_file(const json& value, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << value.dump(2) << '\n';
}

}  // namespace

void cmd_generate(const RunConfig& config, const GenerateOptions& options,
                  std::ostream& out) {
  if (!config.generation.has_value()) {
    throw ConfigError("generate: config has no generation section");
  }
  const RunConfig::GenerationSection& gen = *config.generation;

  GenerationPlan plan = [&] {
    if (options.non_private) {
      if (!config.non_private.has_value() && !options.temperature) {
        throw ConfigError(
            "generate: --non-private needs a non_private config section or "
            "an explicit --tau");
      }
      RunConfig::NonPrivateSection np =
          config.non_private.value_or(RunConfig::NonPrivateSection{});
      if (options.temperature) {
        np.temperature = *options.temperature;
      }
      if (!config.non_private.has_value()) {
        // Structural sizes fall back to the dp section when only --tau was
        // given on the command line.
        if (!config.dp.has_value()) {
          throw ConfigError(
              "generate: non-private mode needs subset_size/max_tokens from "
              "a non_private or dp section");
        }
        np.clip_bound = config.dp->clip_bound;
        np.subset_size = config.dp->subset_size;
        np.max_tokens = config.dp->max_tokens;
      }
      return GenerationPlan::with_explicit_temperature(
          np.temperature, np.clip_bound, np.subset_size, np.max_tokens);
    }
    if (!config.dp.has_value()) {
      throw ConfigError("generate: config has no dp section");
    }
    return GenerationPlan::from_dp(*config.dp);
  }();

  const std::uint64_t master_seed =
      options.master_seed.value_or(gen.master_seed);
  const fs::path out_dir = options.output_dir.value_or(config.output_dir);
  fs::create_directories(out_dir);

  auto provider = config.make_provider();
  GenerationTask task = resolve_task(gen.template_set, gen.private_template,
                                     gen.public_template, gen.extras);
  Generator generator(*provider, std::move(task), gen.parallelism);

  std::vector<PrivateExample> data = load_dataset(gen.dataset_path);

  std::vector<SyntheticRecord> completed;
  std::vector<SyntheticRecord> partial;  // records finished before a failure
  try {
    completed = generator.generate_corpus(
        data, plan, gen.counts_per_label, gen.per_label, master_seed,
        [&partial](const SyntheticRecord& record) {
          partial.push_back(record);
        });
  } catch (const TransportError&) {
    write_corpus(partial, (out_dir / "corpus.partial.jsonl").string());
    write_traces(partial, (out_dir / "traces.partial.jsonl").string());
    throw;
  }

  write_corpus(completed, (out_dir / "corpus.jsonl").string());
  write_traces(completed, (out_dir / "traces.jsonl").string());

  json manifest{{"tool", "dptext"},
                {"version", kVersion},
                {"config_hash", config.config_hash},
                {"master_seed", master_seed},
                {"mode", plan.non_private() ? "non_private" : "dp"},
                {"plan",
                 {{"clip_bound", plan.clip_bound},
                  {"subset_size", plan.subset_size},
                  {"temperature", plan.temperature},
                  {"max_tokens", plan.max_tokens}}},
                {"dataset", gen.dataset_path},
                {"records", completed.size()},
                {"corpus", "corpus.jsonl"}};
  if (!plan.non_private()) {
    manifest["accountant"] = report_json(
        AccountantReport{*plan.dp, *plan.derived,
                         compose(plan.derived->per_token_epsilon,
                                 plan.dp->max_tokens, plan.dp->delta)});
  }
  write_json_file(manifest, out_dir / "manifest.json");

  out << "wrote " << completed.size() << " records to "
      << (out_dir / "corpus.jsonl").string() << "\n";
  if (!plan.non_private()) {
    out << AccountantReport{*plan.dp, *plan.derived,
                            compose(plan.derived->per_token_epsilon,
                                    plan.dp->max_tokens, plan.dp->delta)}
               .to_text();
  } else {
    out << "non-private run at temperature " << plan.temperature << "\n";
  }
}

void cmd_audit(const DpParams& params, std::ostream& out) {
  out << audit(params).to_text();
}

void cmd_evaluate(const RunConfig& config, std::ostream& out) {
  if (!config.evaluation.has_value()) {
    throw ConfigError("evaluate: config has no evaluation section");
  }
  const RunConfig::EvaluationSection& eval = *config.evaluation;
  const fs::path out_dir = config.output_dir;
  fs::create_directories(out_dir);

  std::vector<SyntheticRecord> corpus = read_corpus(eval.corpus_path);

  if (eval.kind == "structured") {
    SchemaValidator validator;
    if (!eval.required_keys.empty()) {
      const std::vector<std::string> keys = eval.required_keys;
      validator = [keys](const json& value) {
        if (!value.is_object()) {
          return false;
        }
        return std::all_of(keys.begin(), keys.end(), [&](const auto& key) {
          return value.contains(key);
        });
      };
    }
    const StructuredEval result = evaluate_structured(corpus, validator);
    out << "structured evaluation: parses " << result.parse_rate
        << "%, validates " << result.validate_rate << "%, raw "
        << result.raw_count << "\n";
    write_json_file(json{{"kind", "structured"},
                         {"parse_rate", result.parse_rate},
                         {"validate_rate", result.validate_rate},
                         {"raw_count", result.raw_count}},
                    out_dir / "eval_report.json");
    return;
  }

  auto provider = config.make_provider();
  const IclTask task = IclTask::load(eval.task_path);
  const EvalReport report =
      evaluate_icl(corpus, task, eval.k, eval.runs, eval.seed, *provider);
  out << report.to_text();
  write_json_file(json{{"kind", "icl"},
                       {"task", task.name},
                       {"k", report.shots},
                       {"runs", report.runs},
                       {"accuracy_mean", report.accuracy_mean},
                       {"accuracy_std", report.accuracy_std},
                       {"per_run", report.per_run},
                       {"seed", eval.seed}},
                  out_dir / "eval_report.json");
}

void cmd_attack(const RunConfig& config, std::ostream& out) {
  if (!config.attack.has_value()) {
    throw ConfigError("attack: config has no attack section");
  }
  if (!config.dp.has_value()) {
    throw ConfigError("attack: config has no dp section");
  }
  const RunConfig::AttackSection& attack = *config.attack;
  const fs::path out_dir = config.output_dir;
  fs::create_directories(out_dir);

  auto provider = config.make_provider();
  std::vector<double> epsilons = attack.epsilons;
  if (epsilons.empty()) {
    epsilons.push_back(config.dp->epsilon);
  }

  json report{{"kind", attack.kind},
              {"trials", attack.trials},
              {"seed", attack.seed}};

  if (attack.kind == "pii_extraction") {
    std::vector<PrivateExample> data = load_dataset(attack.dataset_path);
    PiiAttackConfig pii;
    pii.attack_prompt = attack.attack_prompt;
    pii.trials = attack.trials;
    pii.naive_temperature = attack.naive_temperature;

    json per_epsilon = json::array();
    for (double epsilon : epsilons) {
      DpParams params = *config.dp;
      params.epsilon = epsilon;
      params.max_tokens = attack.max_tokens;
      const PiiAttackResult result =
          run_pii_attack(data, params, *provider, pii, attack.seed);
      out << "pii attack: epsilon " << epsilon << " -> " << result.leak_count
          << "/" << result.trials << " leaks\n";
      per_epsilon.push_back({{"epsilon", epsilon},
                             {"leak_count", result.leak_count},
                             {"targets", result.targets.size()}});
    }
    const int naive_leaks = run_naive_decode_leaks(
        data, *provider, pii, attack.max_tokens, derive_seed(attack.seed, 777));
    out << "pii attack: naive non-private decode -> " << naive_leaks << "/"
        << attack.trials << " leaks\n";
    report["per_epsilon"] = per_epsilon;
    report["naive_leaks"] = naive_leaks;
  } else {
    std::vector<PrivateExample> members = load_dataset(attack.member_path);
    std::vector<PrivateExample> nonmembers =
        load_dataset(attack.nonmember_path);

    MiaConfig mia;
    mia.params = *config.dp;
    mia.demo_template = attack.demo_template;
    mia.query_template = attack.query_template;
    mia.generation = resolve_task(attack.template_set, attack.private_template,
                                  attack.public_template, {});

    json per_epsilon = json::array();
    for (double epsilon : epsilons) {
      mia.params.epsilon = epsilon;
      const double auc = run_mia(members, nonmembers, *provider, attack.trials,
                                 attack.seed, MiaArm::kDp, mia);
      out << "mia: epsilon " << epsilon << " -> mean AUC " << auc << "\n";
      per_epsilon.push_back({{"epsilon", epsilon}, {"auc", auc}});
    }
    const double non_private_auc =
        run_mia(members, nonmembers, *provider, attack.trials, attack.seed,
                MiaArm::kNonPrivate, mia);
    out << "mia: non-private -> mean AUC " << non_private_auc << "\n";
    report["per_epsilon"] = per_epsilon;
    report["non_private_auc"] = non_private_auc;
  }

  write_json_file(report, out_dir / "attack_report.json");
}

}  // namespace dptext
