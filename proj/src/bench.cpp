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

#include "ebfl/bench.hpp"

#include <chrono>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {

SelectionProblem random_selection_problem(std::size_t pool, std::size_t cohort,
                                          double budget_clients,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> phi(0.05, 1.0);
  std::uniform_real_distribution<double> tau(20.0, 300.0);
  std::uniform_real_distribution<double> watts(5.0, 40.0);
  SelectionProblem p;
  p.max_cohort = cohort;
  p.alpha = 0.5;
  double total = 0.0;
  for (std::size_t i = 0; i < pool; ++i) {
    SelectionCandidate c;
    c.client = i;
    c.surrogate = phi(rng);
    c.maxn_time_s = tau(rng);
    c.maxn_energy_j = c.maxn_time_s * watts(rng);
    total += c.maxn_energy_j;
    p.candidates.push_back(c);
  }
  p.remaining_budget_j = budget_clients * static_cast<double>(cohort) * total /
                         static_cast<double>(pool);
  return p;
}

std::vector<BenchCell> bench_selection(const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchCell> cells;
  for (const std::size_t pool : config.pools) {
    for (const std::size_t cohort : config.cohorts) {
      BenchCell cell;
      cell.pool = pool;
      cell.cohort = cohort;
      if (pool == 0 || cohort == 0) {
        cell.skipped = true;
        cell.reason = "sizes must be >= 1";
      } else if (cohort > pool) {
        cell.skipped = true;
        cell.reason = fmt::format("cohort {} exceeds pool {}", cohort, pool);
      }
      if (cell.skipped) {
        cells.push_back(cell);
        continue;
      }
      const auto start = Clock::now();
      SolveOptions opts;
      opts.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(config.timeout_s));
      double total_ms = 0.0;
      double total_nodes = 0.0;
      for (std::size_t r = 0; r < config.reps; ++r) {
        const auto problem = random_selection_problem(
            pool, cohort, config.budget_clients,
            derive_seed(config.seed, pool, cohort, r));
        const auto t0 = Clock::now();
        try {
          const auto sol = ilp_cs(problem, opts);
          total_nodes += sol ? static_cast<double>(sol->nodes) : 0.0;
        } catch (const TimeoutError&) {
          cell.timed_out = true;
          cell.reason = fmt::format("did not finish within {:g} s",
                                    config.timeout_s);
          break;
        }
        total_ms +=
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        ++cell.reps_done;
      }
      if (cell.reps_done > 0) {
        cell.mean_ms = total_ms / static_cast<double>(cell.reps_done);
        cell.mean_nodes = total_nodes / static_cast<double>(cell.reps_done);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells) {
  out << "pool,cohort,reps,mean_ms,mean_nodes,status\n";
  for (const auto& c : cells) {
    const std::string status =
        c.skipped ? "skipped: " + c.reason
                  : (c.timed_out ? "timeout: " + c.reason : std::string("ok"));
    out << fmt::format("{},{},{},{:.4f},{:.1f},{}\n", c.pool, c.cohort,
                       c.reps_done, c.mean_ms, c.mean_nodes, status);
  }
}

}  // namespace ebfl
