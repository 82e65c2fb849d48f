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

#include "dptext/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "dptext/common.hpp"
#include "dptext/errors.hpp"

namespace dptext {

using nlohmann::json;

std::vector<PrivateExample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("dataset: cannot open " + path);
  }
  std::vector<PrivateExample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() ||
        !record.contains("text") || !record.contains("label")) {
      throw ParseError("dataset: malformed record at " + path + ":" +
                       std::to_string(line_no));
    }
    PrivateExample example{record.at("text").get<std::string>(),
                           record.at("label").get<std::string>()};
    if (example.text.empty()) {
      throw ParseError("dataset: empty text at " + path + ":" +
                       std::to_string(line_no));
    }
    out.push_back(std::move(example));
  }
  return out;
}

void save_dataset(std::span<const PrivateExample> data,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("dataset: cannot write " + path);
  }
  for (const auto& example : data) {
    out << json{{"text", example.text}, {"label", example.label}}.dump()
        << '\n';
  }
}

std::vector<Subset> partition_dataset(
    std::span<const PrivateExample> data, std::size_t subset_size,
    bool per_label, std::optional<std::uint64_t> shuffle_seed) {
  if (subset_size < 1) {
    throw InvalidParameterError("partition: subset size must be at least 1");
  }
  if (data.size() < subset_size) {
    throw InsufficientDataError(
        "partition: need at least " + std::to_string(subset_size) +
        " examples, got " + std::to_string(data.size()));
  }

  // Pools keyed by label when per_label is set, otherwise one mixed pool.
  // Labels keep first-appearance order so partitions are deterministic.
  std::vector<std::string> pool_order;
  std::map<std::string, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string key = per_label ? data[i].label : std::string();
    if (pools.find(key) == pools.end()) {
      pool_order.push_back(key);
    }
    pools[key].push_back(i);
  }

  std::vector<Subset> subsets;
  for (std::size_t pool_index = 0; pool_index < pool_order.size();
       ++pool_index) {
    auto& indices = pools[pool_order[pool_index]];
    if (shuffle_seed.has_value()) {
      std::mt19937_64 rng(derive_seed(*shuffle_seed, pool_index));
      for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(
            uniform01(rng) * static_cast<double>(i));
        std::swap(indices[i - 1], indices[std::min(j, i - 1)]);
      }
    }
    const std::size_t count = indices.size() / subset_size;
    for (std::size_t k = 0; k < count; ++k) {
      Subset subset;
      subset.label = pool_order[pool_index];
      subset.indices.assign(
          indices.begin() + static_cast<std::ptrdiff_t>(k * subset_size),
          indices.begin() + static_cast<std::ptrdiff_t>((k + 1) * subset_size));
      subsets.push_back(std::move(subset));
    }
  }
  return subsets;
}

}  // namespace dptext
