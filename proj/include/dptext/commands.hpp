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

#include <iosfwd>
#include <optional>
#include <string>

#include "dptext/config.hpp"

namespace dptext {

struct GenerateOptions {
  bool non_private = false;
  std::optional<double> temperature;  // overrides non_private.temperature
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> output_dir;
};

// Generates a corpus and writes corpus.jsonl, traces.jsonl and
// manifest.json under the output directory. On a provider failure the
// records completed so far are persisted as corpus.partial.jsonl /
// traces.partial.jsonl before the error propagates.
void cmd_generate(const RunConfig& config, const GenerateOptions& options,
                  std::ostream& out);

// Prints the accountant report for the given budget. No side effects.
void cmd_audit(const DpParams& params, std::ostream& out);

// Runs the configured evaluation (ICL accuracy or structured parse rates),
// echoes the metrics and writes a machine-readable report.
void cmd_evaluate(const RunConfig& config, std::ostream& out);

// Runs the configured attack (PII extraction or membership inference) per
// epsilon, echoes the results and writes a machine-readable report.
void cmd_attack(const RunConfig& config, std::ostream& out);

}  // namespace dptext
