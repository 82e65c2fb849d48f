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

#include "dptext/pipeline.hpp"

#include <deque>
#include <fstream>
#include <iomanip>
#include <future>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dptext/errors.hpp"

namespace dptext {

using nlohmann::json;

GenerationPlan GenerationPlan::from_dp(const DpParams& params) {
  GenerationPlan plan;
  plan.dp = params;
  plan.derived = solve_temperature(params);
  plan.clip_bound = params.clip_bound;
  plan.subset_size = params.subset_size;
  plan.temperature = plan.derived->temperature;
  plan.max_tokens = params.max_tokens;
  return plan;
}

GenerationPlan GenerationPlan::with_explicit_temperature(double temperature,
                                                         double clip_bound,
                                                         int subset_size,
                                                         int max_tokens) {
  if (!(temperature > 0.0)) {
    throw InvalidParameterError("non-private temperature must be positive");
  }
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("clip bound must be positive");
  }
  if (subset_size < 1 || max_tokens < 1) {
    throw InvalidParameterError(
        "subset size and max tokens must be at least 1");
  }
  GenerationPlan plan;
  plan.clip_bound = clip_bound;
  plan.subset_size = subset_size;
  plan.temperature = temperature;
  plan.max_tokens = max_tokens;
  return plan;
}

Generator::Generator(LogitProvider& provider, GenerationTask task,
                     int parallelism)
    : provider_(provider), task_(std::move(task)), parallelism_(parallelism) {
  if (parallelism_ < 1) {
    throw InvalidParameterError("parallelism must be at least 1");
  }
}

namespace {

// Advances every session to its next logits, fanning out across at most
// `parallelism` threads. Results land by session index, so aggregation
// order (and therefore floating-point behavior) never depends on
// completion order.
std::vector<LogitVector> collect_logits(
    std::vector<std::unique_ptr<ProviderSession>>& sessions, int parallelism) {
  std::vector<LogitVector> out(sessions.size());
  if (parallelism <= 1 || sessions.size() <= 1) {
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      out[i] = sessions[i]->next_logits();
    }
    return out;
  }
  const std::size_t chunks =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism),
                            sessions.size());
  std::vector<std::future<void>> futures;
  futures.reserve(chunks);
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    futures.push_back(std::async(std::launch::async, [&, chunk] {
      for (std::size_t i = chunk; i < sessions.size(); i += chunks) {
        out[i] = sessions[i]->next_logits();
      }
    }));
  }
  for (auto& f : futures) {
    f.get();
  }
  return out;
}

}  // namespace

SyntheticRecord Generator::generate_example(
    std::span<const PrivateExample> subset, const std::string& label,
    const GenerationPlan& plan, std::uint64_t seed,
    const StepObserver& observer) const {
  if (subset.size() != static_cast<std::size_t>(plan.subset_size)) {
    throw InsufficientDataError(
        "generate_example: subset has " + std::to_string(subset.size()) +
        " examples, plan requires exactly " +
        std::to_string(plan.subset_size));
  }

  const std::string public_prompt =
      task_.public_template.render(label, std::nullopt, task_.extras);
  // Defense check behind the type-level guarantee: the public prompt must
  // not carry any private example text.
  for (const auto& example : subset) {
    if (public_prompt.find(example.text) != std::string::npos) {
      throw PolicyError(
          "public prompt contains private example text; refusing to open "
          "the public session");
    }
  }

  std::vector<std::unique_ptr<ProviderSession>> sessions;
  sessions.reserve(subset.size() + 1);
  for (const auto& example : subset) {
    sessions.push_back(provider_.open_session_text(
        task_.private_template.render(label, example, task_.extras)));
  }
  sessions.push_back(provider_.open_session_text(public_prompt));

  std::optional<BudgetLedger> ledger;
  if (!plan.non_private()) {
    ledger.emplace(*plan.dp, plan.derived->per_token_epsilon);
  }

  SyntheticRecord record;
  record.label = label;
  record.trace.seed = seed;
  if (plan.derived.has_value() && plan.dp.has_value()) {
    record.trace.report = AccountantReport{
        *plan.dp, *plan.derived,
        compose(plan.derived->per_token_epsilon, plan.dp->max_tokens,
                plan.dp->delta)};
  }

  std::mt19937_64 rng(seed);
  const TokenId eos = provider_.eos_token();

  for (int step = 0; step < plan.max_tokens; ++step) {
    std::vector<LogitVector> logits = collect_logits(sessions, parallelism_);
    LogitVector public_logits = std::move(logits.back());
    logits.pop_back();

    const LogitVector private_mean = aggregate_private(
        logits, plan.clip_bound, static_cast<std::size_t>(plan.subset_size));
    const ClippedLogits public_clipped =
        clip_logits(public_logits, plan.clip_bound);
    const LogitVector blended = blend(private_mean, public_clipped);
    const TokenId sampled = sample_token(blended, plan.temperature, rng);

    if (ledger.has_value()) {
      ledger->charge();
    }

    StepTrace step_trace;
    step_trace.temperature = plan.temperature;
    if (!plan.non_private()) {
      step_trace.epsilon_charged = plan.derived->per_token_epsilon;
    }
    step_trace.sampled = sampled;

    const bool is_eos = (sampled == eos);
    if (!is_eos) {
      record.tokens.push_back(sampled);
    }
    step_trace.tokens_emitted = static_cast<int>(record.tokens.size());
    record.trace.steps.push_back(step_trace);

    if (observer) {
      StepObservation obs;
      obs.step = step;
      obs.private_mean = private_mean;
      obs.public_clipped = public_clipped;
      obs.blended = blended;
      obs.distribution = token_distribution(blended, plan.temperature);
      obs.sampled = sampled;
      observer(obs);
    }

    if (is_eos) {
      record.trace.eos_terminated = true;
      break;
    }
    for (auto& session : sessions) {
      session->append_token(sampled);
    }
  }

  record.trace.truncated = !record.trace.eos_terminated;
  record.text = provider_.decode(record.tokens);
  return record;
}

std::vector<SyntheticRecord> Generator::generate_corpus(
    std::span<const PrivateExample> data, const GenerationPlan& plan,
    const std::vector<std::pair<std::string, int>>& counts_per_label,
    bool per_label, std::uint64_t master_seed,
    const std::function<void(const SyntheticRecord&)>& on_record) const {
  int requested = 0;
  for (const auto& [label, count] : counts_per_label) {
    if (count < 0) {
      throw InvalidParameterError("negative example count for label '" +
                                  label + "'");
    }
    requested += count;
  }
  std::vector<SyntheticRecord> records;
  if (requested == 0) {
    return records;
  }

  std::vector<Subset> subsets = partition_dataset(
      data, static_cast<std::size_t>(plan.subset_size), per_label,
      derive_seed(master_seed, 0));

  // Queue subsets per pool so each is consumed at most once: one subset,
  // one synthetic example. Reuse would multiply the composition count.
  std::map<std::string, std::deque<const Subset*>> available;
  for (const auto& subset : subsets) {
    available[subset.label].push_back(&subset);
  }

  std::uint64_t example_counter = 0;
  for (const auto& [label, count] : counts_per_label) {
    auto& queue = available[per_label ? label : std::string()];
    if (static_cast<int>(queue.size()) < count) {
      throw InsufficientDataError(
          "label '" + label + "': requested " + std::to_string(count) +
          " examples but only " + std::to_string(queue.size()) +
          " disjoint subsets of size " + std::to_string(plan.subset_size) +
          " are available");
    }
    for (int i = 0; i < count; ++i) {
      const Subset* subset = queue.front();
      queue.pop_front();

      std::vector<PrivateExample> members;
      members.reserve(subset->indices.size());
      for (std::size_t index : subset->indices) {
        members.push_back(data[index]);
      }

      SyntheticRecord record = generate_example(
          members, label, plan, derive_seed(master_seed, 1 + example_counter));

      std::ostringstream subset_id;
      subset_id << "subset[";
      for (std::size_t k = 0; k < subset->indices.size(); ++k) {
        subset_id << (k ? "," : "") << subset->indices[k];
      }
      subset_id << "]";
      record.trace.subset_id = subset_id.str();

      std::ostringstream ref;
      ref << "g" << std::setw(5) << std::setfill('0') << example_counter;
      record.trace_ref = ref.str();

      ++example_counter;
      if (on_record) {
        on_record(record);
      }
      records.push_back(std::move(record));
    }
  }
  return records;
}

void write_corpus(std::span<const SyntheticRecord> records,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("corpus: cannot write " + path);
  }
  for (const auto& record : records) {
    out << json{{"text", record.text},
                {"label", record.label},
                {"tokens", record.tokens},
                {"trace_ref", record.trace_ref}}
               .dump()
        << '\n';
  }
  if (!out) {
    throw ConfigError("corpus: write to " + path + " failed");
  }
}

std::vector<SyntheticRecord> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("corpus: cannot open " + path);
  }
  std::vector<SyntheticRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() ||
        !parsed.contains("text") || !parsed.contains("label") ||
        !parsed.contains("tokens") || !parsed.contains("trace_ref")) {
      throw ParseError("corpus: malformed record at " + path + ":" +
                       std::to_string(line_no));
    }
    SyntheticRecord record;
    record.text = parsed.at("text").get<std::string>();
    record.label = parsed.at("label").get<std::string>();
    record.tokens = parsed.at("tokens").get<TokenSequence>();
    record.trace_ref = parsed.at("trace_ref").get<std::string>();
    records.push_back(std::move(record));
  }
  return records;
}

void write_traces(std::span<const SyntheticRecord> records,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("traces: cannot write " + path);
  }
  for (const auto& record : records) {
    json steps = json::array();
    for (const auto& step : record.trace.steps) {
      json entry{{"tau", step.temperature},
                 {"tokens_emitted", step.tokens_emitted},
                 {"token", step.sampled}};
      if (step.epsilon_charged.has_value()) {
        entry["epsilon_charged"] = *step.epsilon_charged;
      }
      steps.push_back(std::move(entry));
    }
    json entry{{"trace_ref", record.trace_ref},
               {"seed", record.trace.seed},
               {"subset_id", record.trace.subset_id},
               {"eos_terminated", record.trace.eos_terminated},
               {"truncated", record.trace.truncated},
               {"steps", std::move(steps)}};
    if (record.trace.report.has_value()) {
      const AccountantReport& report = *record.trace.report;
      entry["accountant"] = {
          {"epsilon", report.params.epsilon},
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
    out << entry.dump() << '\n';
  }
}

}  // namespace dptext
