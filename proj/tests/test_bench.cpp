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

#include <sstream>

#include <gtest/gtest.h>

#include "ebfl/bench.hpp"

namespace ebfl {
namespace {

TEST(Bench, OneCellPerPair) {
  BenchConfig cfg;
  cfg.pools = {8, 16, 32};
  cfg.cohorts = {4, 8};
  cfg.reps = 2;
  const auto cells = bench_selection(cfg);
  ASSERT_EQ(cells.size(), 6u);
  for (const auto& c : cells) {
    EXPECT_FALSE(c.skipped);
    EXPECT_FALSE(c.timed_out);
    EXPECT_EQ(c.reps_done, 2u);
    EXPECT_GT(c.mean_nodes, 0.0);
  }
}

TEST(Bench, CohortAbovePoolSkipped) {
  BenchConfig cfg;
  cfg.pools = {4};
  cfg.cohorts = {8};
  cfg.reps = 1;
  const auto cells = bench_selection(cfg);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].skipped);
  EXPECT_FALSE(cells[0].reason.empty());
  std::ostringstream out;
  write_bench_csv(out, cells);
  EXPECT_NE(out.str().find("skipped"), std::string::npos);
}

TEST(Bench, HardInstanceTimesOut) {
  BenchConfig cfg;
  cfg.pools = {512};
  cfg.cohorts = {64};
  cfg.reps = 1;
  cfg.timeout_s = 0.05;
  cfg.budget_clients = 40.0;
  const auto cells = bench_selection(cfg);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].timed_out);
  std::ostringstream out;
  write_bench_csv(out, cells);
  EXPECT_NE(out.str().find("timeout"), std::string::npos);
}

TEST(Bench, ProblemsAreReproducible) {
  const auto a = random_selection_problem(32, 8, 0.6, 3);
  const auto b = random_selection_problem(32, 8, 0.6, 3);
  ASSERT_EQ(a.candidates.size(), 32u);
  for (std::size_t k = 0; k < 32; ++k) {
    EXPECT_EQ(a.candidates[k].surrogate, b.candidates[k].surrogate);
    EXPECT_GT(a.candidates[k].surrogate, 0.0);
  }
  EXPECT_NO_THROW(a.validate());
}

}  // namespace
}  // namespace ebfl
