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

#ifndef EBFL_SELECTOR_HPP_
#define EBFL_SELECTOR_HPP_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebfl/device_model.hpp"

namespace ebfl {

struct SelectionCandidate {
  std::size_t client = 0;
  double surrogate = 1.0;
  double maxn_time_s = 0.0;
  double maxn_energy_j = 0.0;
  const ParetoFront* front = nullptr;
  int cooldown = 0;
};

struct SelectionProblem {
  std::vector<SelectionCandidate> candidates;
  double remaining_budget_j = 0.0;
  std::size_t max_cohort = 1;
  double alpha = 0.5;

  void validate() const;
};

struct CohortSolution {
  std::vector<std::size_t> cohort;  // client ids, ascending
  double objective = 0.0;
  double maxn_time_s = 0.0;
  double maxn_energy_j = 0.0;
  std::size_t nodes = 0;
};

struct SolveOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Ties closer than this are broken by energy, then time, then ids.
inline constexpr double kObjectiveTolerance = 1e-12;

// alpha * T / tau_max - (1 - alpha) * sum(Phi) with the sum taken in
// ascending client order. `cohort` holds client ids.
double cohort_objective(const SelectionProblem& problem,
                        std::span<const std::size_t> cohort);

// Exact cohort choice at MAXN. nullopt when no non-empty eligible cohort
// fits the remaining budget. Throws TimeoutError past the deadline.
std::optional<CohortSolution> ilp_cs(const SelectionProblem& problem,
                                     const SolveOptions& options = {});

struct ModeAssignment {
  std::size_t client = 0;
  std::string mode_id;
  double round_time_s = 0.0;
  double energy_j = 0.0;
  double maxn_energy_j = 0.0;
};

// Lowest-energy front point no slower than round_time_s.
ModeAssignment assign_mode(std::size_t client, const ParetoFront& front,
                           double round_time_s);

std::vector<ModeAssignment> ilp_pm(const SelectionProblem& problem,
                                   std::span<const std::size_t> cohort,
                                   double round_time_s);

struct SelectionPlan {
  std::vector<std::size_t> cohort;
  std::vector<ModeAssignment> modes;
  double predicted_time_s = 0.0;  // MAXN round time
  double round_time_s = 0.0;      // max assigned time
  double maxn_energy_j = 0.0;
  double energy_j = 0.0;
  double objective = 0.0;
  std::size_t nodes = 0;
};

std::optional<SelectionPlan> solve_bilevel(const SelectionProblem& problem,
                                           const SolveOptions& options = {});

// Selected clients get ceil(rho * accuracy_pct); other positive counters
// drop by one. `selected` pairs client ids with local accuracy in percent.
std::vector<int> cooldown_update(
    std::span<const int> counters,
    std::span<const std::pair<std::size_t, double>> selected, double rho);

}  // namespace ebfl

#endif  // EBFL_SELECTOR_HPP_
