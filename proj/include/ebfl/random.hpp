// Copyright 2026 The ebfl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EBFL_RANDOM_HPP_
#define EBFL_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace ebfl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent child seed for a named stream. Chains for nested streams:
// derive_seed(master, kTrain, round, client).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t state = base ^ (stream * 0xD1B54A32D192ED03ULL);
  splitmix64(state);
  return splitmix64(state);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          Rest... rest) {
  return derive_seed(derive_seed(base, stream), rest...);
}

// Stream tags used by the experiment harness.
enum SeedStream : std::uint64_t {
  kDatasetStream = 1,
  kPartitionStream = 2,
  kProfileStream = 3,
  kProfileNoiseStream = 4,
  kModelInitStream = 5,
  kTrainStream = 6,
  kStrategyStream = 7,
  kCohortSampleStream = 8,
};

}  // namespace ebfl

#endif  // EBFL_RANDOM_HPP_
