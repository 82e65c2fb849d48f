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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dptext/prompts.hpp"

namespace dptext {

// Line-delimited {"text": ..., "label": ...} records.
std::vector<PrivateExample> load_dataset(const std::string& path);
void save_dataset(std::span<const PrivateExample> data,
                  const std::string& path);

// One disjoint private subset; label is empty for mixed (non-per-label)
// partitions.
struct Subset {
  std::string label;
  std::vector<std::size_t> indices;
};

// Carves the dataset into pairwise-disjoint subsets of exactly subset_size
// examples. Leftover examples (size mod s per pool) are unused, never
// recycled: recycling would break the disjointness the privacy analysis
// assumes. With per_label set, each subset is drawn from a single label's
// pool (pools ordered by first appearance). A shuffle seed permutes each
// pool deterministically before carving.
std::vector<Subset> partition_dataset(
    std::span<const PrivateExample> data, std::size_t subset_size,
    bool per_label, std::optional<std::uint64_t> shuffle_seed = std::nullopt);

}  // namespace dptext
