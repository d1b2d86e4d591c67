// Copyright 2026 The dpcert Authors.
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

#ifndef DPCERT_RNG_H_
#define DPCERT_RNG_H_

#include <cstdint>
#include <random>

namespace dpcert {

using Rng = std::mt19937_64;

// Seed for the `index`-th independent stream under `master_seed`. Pure
// function of its arguments, so streams can be handed to threads in any order.
inline std::uint64_t DeriveSeed(std::uint64_t master_seed,
                                std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline Rng MakeStream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(DeriveSeed(master_seed, index));
}

}  // namespace dpcert

#endif  // DPCERT_RNG_H_
