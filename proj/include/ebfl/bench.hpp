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

#ifndef EBFL_BENCH_HPP_
#define EBFL_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebfl/selector.hpp"

namespace ebfl {

struct BenchConfig {
  std::vector<std::size_t> pools{8, 32, 128};
  std::vector<std::size_t> cohorts{4, 8};
  std::size_t reps = 5;
  double timeout_s = 3600.0;  // per cell
  std::uint64_t seed = 1;
  // Budget as a multiple of the mean MAXN energy; below the cohort size the
  // budget binds before gamma does.
  double budget_clients = 0.6;
};

struct BenchCell {
  std::size_t pool = 0;
  std::size_t cohort = 0;
  std::size_t reps_done = 0;
  double mean_ms = 0.0;
  double mean_nodes = 0.0;
  bool timed_out = false;
  bool skipped = false;
  std::string reason;
};

// Dense surrogates in (0, 1], MAXN times 20-300 s, power 5-40 W.
SelectionProblem random_selection_problem(std::size_t pool, std::size_t cohort,
                                          double budget_clients,
                                          std::uint64_t seed);

std::vector<BenchCell> bench_selection(const BenchConfig& config);

// pool,cohort,reps,mean_ms,mean_nodes,status
void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells);

}  // namespace ebfl

#endif  // EBFL_BENCH_HPP_
