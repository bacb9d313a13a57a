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

#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "ebfl/error.hpp"
#include "ebfl/selector.hpp"
#include "oracles.hpp"

namespace ebfl {
namespace {

SelectionProblem three_clients() {
  SelectionProblem p;
  p.candidates = {{0, 1.0, 10, 100, nullptr, 0},
                  {1, 0.6, 5, 50, nullptr, 0},
                  {2, 0.2, 5, 50, nullptr, 0}};
  p.remaining_budget_j = 120;
  p.max_cohort = 2;
  p.alpha = 0.5;
  return p;
}

ParetoFront front(std::initializer_list<ParetoPoint> pts) {
  return ParetoFront{std::vector<ParetoPoint>(pts)};
}

TEST(IlpCs, WorkedExample) {
  const auto sol = ilp_cs(three_clients());
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->cohort, (std::vector<std::size_t>{1, 2}));
  EXPECT_NEAR(sol->objective, -0.15, 1e-12);
  EXPECT_DOUBLE_EQ(sol->maxn_energy_j, 100.0);
  EXPECT_DOUBLE_EQ(sol->maxn_time_s, 5.0);
}

TEST(IlpCs, AlphaZeroTakesTopSurrogates) {
  auto p = three_clients();
  p.alpha = 0.0;
  p.remaining_budget_j = 1000;
  EXPECT_EQ(ilp_cs(p)->cohort, (std::vector<std::size_t>{0, 1}));
}

TEST(IlpCs, BudgetBelowEverySingleIsInfeasible) {
  auto p = three_clients();
  p.remaining_budget_j = 49;
  EXPECT_FALSE(ilp_cs(p).has_value());
}

TEST(IlpCs, CooledDownClientsExcluded) {
  auto p = three_clients();
  p.candidates[1].cooldown = 2;
  const auto sol = ilp_cs(p);
  ASSERT_TRUE(sol);
  EXPECT_EQ(std::count(sol->cohort.begin(), sol->cohort.end(), 1u), 0);
  for (auto& c : p.candidates) c.cooldown = 1;
  EXPECT_THROW(ilp_cs(p), ValidationError);
}

TEST(IlpCs, ProblemValidation) {
  auto p = three_clients();
  p.max_cohort = 0;
  EXPECT_THROW(ilp_cs(p), ValidationError);
  p = three_clients();
  p.alpha = 1.5;
  EXPECT_THROW(ilp_cs(p), ValidationError);
  p = three_clients();
  p.remaining_budget_j = -1;
  EXPECT_THROW(ilp_cs(p), ValidationError);
  p = three_clients();
  p.candidates[2].client = 0;
  EXPECT_THROW(ilp_cs(p), DuplicateKeyError);
}

TEST(IlpCs, ObjectiveHelper) {
  const auto p = three_clients();
  const std::size_t ids[] = {0};
  EXPECT_NEAR(cohort_objective(p, ids), 0.0, 1e-15);
}

TEST(IlpCs, NodesBoundedByPowerSet) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = oracle::random_instance(rng, 10, 3);
    for (auto& c : inst.problem.candidates) c.cooldown = 0;
    const auto sol = ilp_cs(inst.problem);
    if (!sol) continue;
    EXPECT_LE(sol->nodes, std::size_t{1} << inst.problem.candidates.size());
  }
}

TEST(IlpCs, DeadlineRaisesTimeout) {
  SelectionProblem p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (std::size_t c = 0; c < 400; ++c) {
    p.candidates.push_back({c, u(rng), 10.0, 50.0 + u(rng), nullptr, 0});
  }
  p.remaining_budget_j = 1e9;
  p.max_cohort = 40;
  p.alpha = 0.3;
  SolveOptions opts;
  opts.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  EXPECT_THROW(ilp_cs(p, opts), TimeoutError);
}

TEST(IlpPm, PicksCheapestWithinRoundTime) {
  const auto f = front({{"a", 6, 120}, {"b", 9, 90}, {"c", 12, 60}});
  const auto m = assign_mode(3, f, 10.0);
  EXPECT_EQ(m.mode_id, "b");
  EXPECT_DOUBLE_EQ(m.energy_j, 90.0);
  EXPECT_DOUBLE_EQ(m.maxn_energy_j, 120.0);
  EXPECT_EQ(assign_mode(3, f, 6.0).mode_id, "a");
  EXPECT_THROW(assign_mode(3, f, 5.0), InfeasibleError);
  EXPECT_THROW(assign_mode(3, ParetoFront{}, 5.0), ValidationError);
}

TEST(IlpPm, SlowestClientKeepsMaxn) {
  const auto slow = front({{"s0", 10, 100}, {"s1", 14, 70}});
  const auto fast = front({{"f0", 4, 80}, {"f1", 7, 50}, {"f2", 11, 30}});
  SelectionProblem p;
  p.candidates = {{0, 1, 10, 100, &slow, 0}, {1, 1, 4, 80, &fast, 0}};
  p.remaining_budget_j = 500;
  p.max_cohort = 2;
  const std::size_t cohort[] = {0, 1};
  const auto modes = ilp_pm(p, cohort, 10.0);
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_EQ(modes[0].mode_id, "s0");
  EXPECT_EQ(modes[1].mode_id, "f1");
}

TEST(Bilevel, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  int solved = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const auto inst = oracle::random_instance(rng, 4, 6);
    const bool any_eligible = std::any_of(
        inst.problem.candidates.begin(), inst.problem.candidates.end(),
        [](const auto& c) { return c.cooldown == 0; });
    if (!any_eligible) {
      EXPECT_THROW(solve_bilevel(inst.problem), ValidationError);
      continue;
    }
    const auto plan = solve_bilevel(inst.problem);
    const auto want = oracle::brute_bilevel(inst.problem, inst.profile_ptrs());
    ASSERT_EQ(plan.has_value(), want.has_value()) << "trial " << trial;
    if (!plan) continue;
    ++solved;
    EXPECT_EQ(plan->cohort, want->cohort) << "trial " << trial;
    EXPECT_NEAR(plan->objective, want->objective, 1e-12);
    EXPECT_NEAR(plan->energy_j, want->energy, 1e-9);
    ASSERT_EQ(plan->modes.size(), want->modes.size());
    for (std::size_t k = 0; k < want->modes.size(); ++k) {
      EXPECT_EQ(plan->modes[k].mode_id, want->modes[k]);
      EXPECT_LE(plan->modes[k].round_time_s, plan->predicted_time_s);
    }
    EXPECT_LE(plan->energy_j, plan->maxn_energy_j + 1e-9);
    EXPECT_LE(plan->maxn_energy_j, inst.problem.remaining_budget_j);
    EXPECT_LE(plan->cohort.size(), inst.problem.max_cohort);
  }
  EXPECT_GT(solved, 300);
}

TEST(Cooldown, Examples) {
  const int none[] = {0, 0};
  const std::pair<std::size_t, double> sel[] = {{0, 80.0}};
  EXPECT_EQ(cooldown_update(none, sel, 0.05), (std::vector<int>{4, 0}));
  EXPECT_EQ(cooldown_update(none, sel, 0.0), (std::vector<int>{0, 0}));
  EXPECT_THROW(cooldown_update(none, sel, -0.1), ValidationError);
}

TEST(Cooldown, EligibleAgainAfterThetaRounds) {
  // theta = 3 set after round r: rounds r+1..r+3 blocked, r+4 eligible.
  std::vector<int> counters = {0};
  const std::pair<std::size_t, double> sel[] = {{0, 60.0}};
  counters = cooldown_update(counters, sel, 0.05);
  ASSERT_EQ(counters[0], 3);
  const int r = 1;
  int next = r + 1;
  while (counters[0] > 0) {
    // Round `next` runs without the client, then counters tick down.
    counters = cooldown_update(counters, {}, 0.05);
    ++next;
  }
  EXPECT_EQ(next, r + 4);
}

}  // namespace
}  // namespace ebfl
