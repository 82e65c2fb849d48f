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

#include "dptext/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "dptext/common.hpp"
#include "dptext/dataset.hpp"
#include "dptext/errors.hpp"

namespace dptext {

using nlohmann::json;

namespace {

double round_tenth(double x) { return std::round(x * 10.0) / 10.0; }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  bool in_space = false;
  for (char c : trim(s)) {
    const bool space = (c == ' ' || c == '\t' || c == '\r' || c == '\n');
    if (space) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) {
      out += ' ';
    }
    in_space = false;
    out += c;
  }
  return out;
}

// Seeded partial Fisher-Yates: the first `take` slots of the returned
// permutation of [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t take,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) {
    indices[i] = i;
  }
  for (std::size_t i = 0; i < take && i + 1 < n; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(uniform01(rng) *
                                     static_cast<double>(n - i));
    std::swap(indices[i], indices[std::min(j, n - 1)]);
  }
  indices.resize(std::min(take, n));
  return indices;
}

TokenId greedy_argmax(const LogitVector& logits) {
  return static_cast<TokenId>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace

IclTask IclTask::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("task: cannot open " + path);
  }
  json parsed = json::parse(in, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw ParseError("task: malformed JSON in " + path);
  }

  IclTask task;
  task.name = parsed.value("name", std::string("unnamed"));
  const std::string kind = parsed.value("kind", std::string());
  if (kind == "classification") {
    task.kind = Kind::kClassification;
    if (!parsed.contains("labels")) {
      throw ConfigError("task: classification tasks need a labels array");
    }
    task.label_set = parsed.at("labels").get<std::vector<std::string>>();
  } else if (kind == "extraction") {
    task.kind = Kind::kExtraction;
    task.slot_name = parsed.value("slot", std::string());
  } else {
    throw ConfigError("task: kind must be classification or extraction");
  }
  if (parsed.contains("prompt_header")) {
    task.prompt_header = parsed.at("prompt_header").get<std::string>();
  }
  if (!parsed.contains("test_path")) {
    throw ConfigError("task: missing test_path");
  }
  const std::filesystem::path test_path =
      std::filesystem::path(path).parent_path() /
      parsed.at("test_path").get<std::string>();
  task.test_examples = load_dataset(test_path.string());
  return task;
}

std::string build_icl_prompt(const std::string& header,
                             std::span<const SyntheticRecord> demos,
                             const std::string& query) {
  std::ostringstream os;
  if (!header.empty()) {
    os << header << '\n';
  }
  for (const auto& demo : demos) {
    os << "Input: " << demo.text << "\nAnswer: " << demo.label << '\n';
  }
  os << "Input: " << query << "\nAnswer: ";
  return os.str();
}

std::string k_shot_predict(std::span<const SyntheticRecord> demos,
                           const std::string& query, LogitProvider& provider,
                           const std::string& header, int max_answer_tokens) {
  const std::string prompt = build_icl_prompt(header, demos, query);
  auto session = provider.open_session_text(prompt);

  const TokenId eos = provider.eos_token();
  TokenSequence answer_tokens;
  for (int i = 0; i < max_answer_tokens; ++i) {
    const TokenId next = greedy_argmax(session->next_logits());
    if (next == eos) {
      break;
    }
    answer_tokens.push_back(next);
    if (provider.decode({next}).find('\n') != std::string::npos) {
      break;
    }
    session->append_token(next);
  }

  std::string answer = provider.decode(answer_tokens);
  const auto newline = answer.find('\n');
  if (newline != std::string::npos) {
    answer.resize(newline);
  }
  return trim(answer);
}

EvalReport evaluate_icl(std::span<const SyntheticRecord> corpus,
                        const IclTask& task, int k, int runs,
                        std::uint64_t seed, LogitProvider& provider) {
  if (k < 0) {
    throw ConfigError("evaluate_icl: k must be nonnegative");
  }
  if (runs < 1) {
    throw ConfigError("evaluate_icl: runs must be at least 1");
  }
  if (task.test_examples.empty()) {
    throw ConfigError("evaluate_icl: task has no test examples");
  }
  if (task.kind == IclTask::Kind::kClassification && k > 0 &&
      task.label_set.empty()) {
    throw ConfigError("evaluate_icl: classification task has no labels");
  }

  // Index corpus records by label once for balanced sampling.
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_label[corpus[i].label].push_back(i);
  }

  EvalReport report;
  report.shots = k;
  report.runs = runs;

  for (int run = 0; run < runs; ++run) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(run)));

    std::vector<SyntheticRecord> demos;
    if (k > 0 && task.kind == IclTask::Kind::kClassification) {
      // Equally many demos per label; when k is not a multiple of the label
      // count, a seeded shuffle decides which labels carry one extra.
      const std::size_t n_labels = task.label_set.size();
      std::vector<std::size_t> label_order(n_labels);
      for (std::size_t i = 0; i < n_labels; ++i) {
        label_order[i] = i;
      }
      for (std::size_t i = 0; i + 1 < n_labels; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(
                    uniform01(rng) * static_cast<double>(n_labels - i));
        std::swap(label_order[i], label_order[std::min(j, n_labels - 1)]);
      }
      const std::size_t base = static_cast<std::size_t>(k) / n_labels;
      const std::size_t extra = static_cast<std::size_t>(k) % n_labels;
      for (std::size_t pos = 0; pos < n_labels; ++pos) {
        const std::string& label = task.label_set[label_order[pos]];
        const std::size_t want = base + (pos < extra ? 1 : 0);
        if (want == 0) {
          continue;
        }
        const auto it = by_label.find(label);
        if (it == by_label.end() || it->second.size() < want) {
          throw ConfigError("evaluate_icl: corpus has fewer than " +
                            std::to_string(want) + " demos for label '" +
                            label + "'");
        }
        for (std::size_t idx : sample_indices(it->second.size(), want, rng)) {
          demos.push_back(corpus[it->second[idx]]);
        }
      }
    } else if (k > 0) {
      if (corpus.size() < static_cast<std::size_t>(k)) {
        throw ConfigError("evaluate_icl: corpus has " +
                          std::to_string(corpus.size()) +
                          " records but k = " + std::to_string(k));
      }
      for (std::size_t idx :
           sample_indices(corpus.size(), static_cast<std::size_t>(k), rng)) {
        demos.push_back(corpus[idx]);
      }
    }

    int correct = 0;
    for (const auto& test : task.test_examples) {
      const std::string prediction =
          k_shot_predict(demos, test.text, provider, task.prompt_header);
      if (task.kind == IclTask::Kind::kClassification) {
        correct += (prediction == test.label) ? 1 : 0;
      } else {
        correct += (normalize_whitespace(prediction) ==
                    normalize_whitespace(test.label))
                       ? 1
                       : 0;
      }
    }
    report.per_run.push_back(100.0 * correct /
                             static_cast<double>(task.test_examples.size()));
  }

  double mean = 0.0;
  for (double a : report.per_run) {
    mean += a;
  }
  mean /= static_cast<double>(runs);
  double variance = 0.0;
  if (runs > 1) {
    for (double a : report.per_run) {
      variance += (a - mean) * (a - mean);
    }
    variance /= static_cast<double>(runs - 1);
  }
  report.accuracy_mean = round_tenth(mean);
  report.accuracy_std = round_tenth(std::sqrt(variance));
  return report;
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "icl evaluation: " << accuracy_mean << " +/- " << accuracy_std << " ("
     << shots << "-shot, " << runs << " runs)\n";
  return os.str();
}

StructuredEval evaluate_structured(std::span<const SyntheticRecord> records,
                                   const SchemaValidator& validator) {
  StructuredEval out;
  out.raw_count = static_cast<int>(records.size());
  if (records.empty()) {
    return out;
  }

  const SchemaValidator check =
      validator ? validator : [](const json& value) {
        return value.is_object() && !value.empty();
      };

  int parsed_count = 0;
  int valid_count = 0;
  for (const auto& record : records) {
    json parsed = json::parse(record.text, nullptr, false);
    if (parsed.is_discarded()) {
      continue;
    }
    ++parsed_count;
    if (check(parsed)) {
      ++valid_count;
    }
  }
  out.parse_rate =
      round_tenth(100.0 * parsed_count / static_cast<double>(records.size()));
  out.validate_rate =
      round_tenth(100.0 * valid_count / static_cast<double>(records.size()));
  return out;
}

}  // namespace dptext
