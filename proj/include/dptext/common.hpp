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
#include <random>
#include <string>
#include <vector>

namespace dptext {

using TokenId = std::int32_t;
using TokenSequence = std::vector<TokenId>;

// Dense next-token logits over the full vocabulary.
using LogitVector = std::vector<double>;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fixed counter scheme for deriving independent per-example seeds from a
// master seed. Part of the reproducibility contract: corpora generated from
// the same master seed are bit-identical.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(master ^ splitmix64(counter + 0x9e3779b97f4a7c15ULL));
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw. Consumes
// exactly one call to the engine, which keeps sampling sequences reproducible
// across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dptext
