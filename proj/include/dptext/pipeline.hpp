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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dptext/accountant.hpp"
#include "dptext/dataset.hpp"
#include "dptext/mechanism.hpp"
#include "dptext/prompts.hpp"
#include "dptext/provider.hpp"

namespace dptext {

// Sampling schedule for one generation run. Private mode derives the
// temperature from a DpParams budget; non-private mode (the epsilon = inf
// baselines) takes an explicit temperature and bypasses the accountant
// entirely rather than feeding infinities into its formulas.
struct GenerationPlan {
  double clip_bound = 0.0;
  int subset_size = 0;
  double temperature = 0.0;
  int max_tokens = 0;
  std::optional<DpParams> dp;
  std::optional<DerivedPrivacy> derived;

  bool non_private() const { return !dp.has_value(); }

  static GenerationPlan from_dp(const DpParams& params);
  static GenerationPlan with_explicit_temperature(double temperature,
                                                  double clip_bound,
                                                  int subset_size,
                                                  int max_tokens);
};

// One privacy-charged step. epsilon_charged is empty in non-private runs.
struct StepTrace {
  double temperature = 0.0;
  std::optional<double> epsilon_charged;
  int tokens_emitted = 0;  // cumulative count after this step
  TokenId sampled = -1;
};

// Audit record of one generated example. The number of steps equals the
// number of emitted tokens, plus one when <eos> terminated the run.
struct GenerationTrace {
  std::vector<StepTrace> steps;
  bool eos_terminated = false;
  bool truncated = false;  // hit the token cap before <eos>
  std::uint64_t seed = 0;
  std::string subset_id;
  std::optional<AccountantReport> report;
};

struct SyntheticRecord {
  TokenSequence tokens;  // never contains <eos>
  std::string text;
  std::string label;
  std::string trace_ref;
  GenerationTrace trace;
};

// Prompt configuration for one generation task. extras feed auxiliary
// template slots such as {field_name}.
struct GenerationTask {
  PromptTemplate private_template;
  PromptTemplate public_template;
  std::map<std::string, std::string> extras;
};

// Everything the mechanism computed at one step, exposed for verification
// against an independent transcription of the algorithm.
struct StepObservation {
  int step = 0;
  LogitVector private_mean;
  ClippedLogits public_clipped;
  LogitVector blended;
  TokenDistribution distribution;
  TokenId sampled = -1;
};
using StepObserver = std::function<void(const StepObservation&)>;

class Generator {
 public:
  // parallelism bounds how many provider sessions advance concurrently at
  // each step barrier; results are identical for any value.
  Generator(LogitProvider& provider, GenerationTask task, int parallelism = 1);

  // Runs the private prediction loop over one disjoint subset: opens s
  // private sessions plus one public session, and per step aggregates the
  // clipped private logits, blends in the clipped public logits, samples at
  // the plan temperature, charges the ledger and appends the token to every
  // session. Stops at <eos> or after max_tokens charges (truncation flag,
  // not an error). Sampling draws one engine value per step from
  // mt19937_64(seed).
  SyntheticRecord generate_example(std::span<const PrivateExample> subset,
                                   const std::string& label,
                                   const GenerationPlan& plan,
                                   std::uint64_t seed,
                                   const StepObserver& observer = {}) const;

  // One record per requested (label, count) pair, each from its own
  // disjoint subset, with per-record seeds derived from master_seed.
  // on_record fires as each record completes, letting callers persist
  // partial output when a later provider call fails.
  std::vector<SyntheticRecord> generate_corpus(
      std::span<const PrivateExample> data, const GenerationPlan& plan,
      const std::vector<std::pair<std::string, int>>& counts_per_label,
      bool per_label, std::uint64_t master_seed,
      const std::function<void(const SyntheticRecord&)>& on_record = {}) const;

  LogitProvider& provider() const { return provider_; }
  const GenerationTask& task() const { return task_; }

 private:
  LogitProvider& provider_;
  GenerationTask task_;
  int parallelism_;
};

// Line-delimited corpus persistence: one {label, text, tokens, trace_ref}
// object per line. read(write(x)) restores those four fields.
void write_corpus(std::span<const SyntheticRecord> records,
                  const std::string& path);
std::vector<SyntheticRecord> read_corpus(const std::string& path);

// Sidecar with the full per-record traces, keyed by trace_ref.
void write_traces(std::span<const SyntheticRecord> records,
                  const std::string& path);

}  // namespace dptext
