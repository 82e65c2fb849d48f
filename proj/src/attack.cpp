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

#include "dptext/attack.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

#include "dptext/errors.hpp"
#include "dptext/mechanism.hpp"

namespace dptext {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

const std::regex& email_pattern() {
  static const std::regex pattern(
      R"([a-z0-9._%+-]+@[a-z0-9-]+(\.[a-z0-9-]+)+)", std::regex::icase);
  return pattern;
}

std::string fill_slots(std::string body, const std::string& text,
                 const std::string& label) {
  const auto replace = [&body](const std::string& slot,
                               const std::string& value) {
    std::size_t pos = 0;
    while ((pos = body.find(slot, pos)) != std::string::npos) {
      body.replace(pos, slot.size(), value);
      pos += value.size();
    }
  };
  replace("{text}", text);
  replace("{label}", label);
  return body;
}

// Sum of per-token log-probabilities of the label continuation given the
// prompt, at the scoring temperature. Pure post-processing: raw logits,
// no mechanism involved.
double label_log_likelihood(LogitProvider& provider, const std::string& prompt,
                            const std::string& label,
                            double score_temperature) {
  auto session = provider.open_session_text(prompt);
  double total = 0.0;
  for (TokenId token : provider.encode(label)) {
    const TokenDistribution dist =
        token_distribution(session->next_logits(), score_temperature);
    total += std::log(std::max(dist.probs[static_cast<std::size_t>(token)],
                               1e-300));
    session->append_token(token);
  }
  return total;
}

// Seeded in-place partial shuffle of [0, n): the first `take` entries.
std::vector<std::size_t> shuffled_prefix(std::size_t n, std::size_t take,
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

}  // namespace

std::vector<std::string> find_emails(const std::string& text) {
  std::vector<std::string> out;
  const std::string lower = lowercase(text);
  auto begin = std::sregex_iterator(lower.begin(), lower.end(),
                                    email_pattern());
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

PiiAttackResult run_pii_attack(std::span<const PrivateExample> private_data,
                               const DpParams& params, LogitProvider& provider,
                               const PiiAttackConfig& config,
                               std::uint64_t seed) {
  if (config.trials < 1) {
    throw InvalidParameterError("pii attack: trials must be at least 1");
  }

  std::set<std::string> target_set;
  for (const auto& example : private_data) {
    for (auto& email : find_emails(example.text)) {
      target_set.insert(std::move(email));
    }
  }
  if (target_set.empty()) {
    throw ConfigError(
        "pii attack: no email addresses found in the private data");
  }

  PiiAttackResult result;
  result.trials = config.trials;
  result.targets.assign(target_set.begin(), target_set.end());

  // Attack prompt comes first so the model sees the instruction before the
  // record, matching instruction-tuned prompting.
  GenerationTask task{
      PromptTemplate(PromptKind::kPrivate, config.attack_prompt + "\n{text}\n"),
      PromptTemplate(PromptKind::kPublic, config.attack_prompt + "\n"),
      {}};
  Generator generator(provider, task);
  const GenerationPlan plan = GenerationPlan::from_dp(params);

  const std::vector<Subset> subsets =
      partition_dataset(private_data,
                        static_cast<std::size_t>(params.subset_size),
                        /*per_label=*/false, derive_seed(seed, 0));

  for (int trial = 0; trial < config.trials; ++trial) {
    const Subset& subset =
        subsets[static_cast<std::size_t>(trial) % subsets.size()];
    std::vector<PrivateExample> members;
    members.reserve(subset.indices.size());
    for (std::size_t index : subset.indices) {
      members.push_back(private_data[index]);
    }

    const SyntheticRecord record = generator.generate_example(
        members, /*label=*/"", plan,
        derive_seed(seed, 1 + static_cast<std::uint64_t>(trial)));

    const std::string generated = lowercase(record.text);
    for (const auto& target : result.targets) {
      if (generated.find(target) != std::string::npos) {
        ++result.leak_count;  // presence, not multiplicity
        break;
      }
    }
  }
  return result;
}

int run_naive_decode_leaks(std::span<const PrivateExample> private_data,
                           LogitProvider& provider,
                           const PiiAttackConfig& config, int max_tokens,
                           std::uint64_t seed) {
  if (max_tokens < 1) {
    throw InvalidParameterError("naive decode: max_tokens must be positive");
  }
  std::vector<const PrivateExample*> email_bearing;
  std::set<std::string> target_set;
  for (const auto& example : private_data) {
    auto emails = find_emails(example.text);
    if (!emails.empty()) {
      email_bearing.push_back(&example);
    }
    for (auto& email : emails) {
      target_set.insert(std::move(email));
    }
  }
  if (email_bearing.empty()) {
    throw ConfigError(
        "naive decode: no email addresses found in the private data");
  }

  const TokenId eos = provider.eos_token();
  int leaks = 0;
  for (int trial = 0; trial < config.trials; ++trial) {
    const PrivateExample& example =
        *email_bearing[static_cast<std::size_t>(trial) % email_bearing.size()];
    const std::string prompt =
        config.attack_prompt + "\n" + example.text + "\n";

    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    auto session = provider.open_session_text(prompt);
    TokenSequence tokens;
    for (int step = 0; step < max_tokens; ++step) {
      const TokenId next = sample_token(session->next_logits(),
                                        config.naive_temperature, rng);
      if (next == eos) {
        break;
      }
      tokens.push_back(next);
      session->append_token(next);
    }

    const std::string generated = lowercase(provider.decode(tokens));
    for (const auto& target : target_set) {
      if (generated.find(target) != std::string::npos) {
        ++leaks;
        break;
      }
    }
  }
  return leaks;
}

double compute_auc(const MiaScorePair& scores) {
  if (scores.member_scores.empty() || scores.nonmember_scores.empty()) {
    throw InvalidInputError("auc: both score lists must be non-empty");
  }
  double favorable = 0.0;
  for (double member : scores.member_scores) {
    for (double nonmember : scores.nonmember_scores) {
      if (member > nonmember) {
        favorable += 1.0;
      } else if (member == nonmember) {
        favorable += 0.5;
      }
    }
  }
  return favorable / (static_cast<double>(scores.member_scores.size()) *
                      static_cast<double>(scores.nonmember_scores.size()));
}

double run_mia(std::span<const PrivateExample> members,
               std::span<const PrivateExample> nonmembers,
               LogitProvider& provider, int trials, std::uint64_t seed,
               MiaArm arm, const MiaConfig& config) {
  if (trials < 1) {
    throw InvalidParameterError("mia: trials must be at least 1");
  }
  if (members.empty() || nonmembers.empty()) {
    throw ConfigError("mia: member and non-member pools must be non-empty");
  }
  for (const auto& member : members) {
    for (const auto& nonmember : nonmembers) {
      if (member.text == nonmember.text) {
        throw ConfigError("mia: pools overlap on text '" + member.text + "'");
      }
    }
  }
  if (arm == MiaArm::kDp && !config.generation.has_value()) {
    throw ConfigError("mia: DP arm needs a generation task configuration");
  }

  double auc_total = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));

    std::string demo_text;
    std::string demo_label;
    if (arm == MiaArm::kNonPrivate) {
      const auto pick = shuffled_prefix(members.size(), 1, rng);
      demo_text = members[pick[0]].text;
      demo_label = members[pick[0]].label;
    } else {
      const auto subset_size =
          static_cast<std::size_t>(config.params.subset_size);
      if (members.size() < subset_size) {
        throw InsufficientDataError("mia: member pool smaller than subset size");
      }
      const auto pick = shuffled_prefix(members.size(), subset_size, rng);
      std::vector<PrivateExample> subset;
      subset.reserve(subset_size);
      for (std::size_t index : pick) {
        subset.push_back(members[index]);
      }
      demo_label = subset.front().label;

      Generator generator(provider, *config.generation);
      const SyntheticRecord record = generator.generate_example(
          subset, demo_label, GenerationPlan::from_dp(config.params),
          derive_seed(seed, 0x10000 + static_cast<std::uint64_t>(trial)));
      demo_text = record.text;
    }

    const std::string demo_block =
        fill_slots(config.demo_template, demo_text, demo_label);

    MiaScorePair scores;
    for (const auto& probe : members) {
      scores.member_scores.push_back(label_log_likelihood(
          provider, demo_block + fill_slots(config.query_template, probe.text, ""),
          probe.label, config.score_temperature));
    }
    for (const auto& probe : nonmembers) {
      scores.nonmember_scores.push_back(label_log_likelihood(
          provider, demo_block + fill_slots(config.query_template, probe.text, ""),
          probe.label, config.score_temperature));
    }
    auc_total += compute_auc(scores);
  }
  return auc_total / static_cast<double>(trials);
}

}  // namespace dptext
