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

#ifndef EBFL_METRICS_HPP_
#define EBFL_METRICS_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebfl/selector.hpp"

namespace ebfl {

struct RoundRecord {
  std::size_t round = 0;
  std::vector<std::size_t> cohort;
  std::vector<ModeAssignment> modes;
  double predicted_time_s = 0.0;  // MAXN estimate
  double round_time_s = 0.0;      // realized, max assigned time
  double maxn_energy_j = 0.0;
  double energy_j = 0.0;
  double cum_energy_j = 0.0;
  double global_acc = 0.0;
  double global_loss = 0.0;
  double selection_wall_ms = 0.0;     // select + scoring + global evaluation
  double selection_modeled_ms = 0.0;  // work units at a fixed rate
  std::size_t evaluations = 0;        // utility evaluations this round
};

enum class TimeSource { kModeled, kWall };

TimeSource parse_time_source(const std::string& name);
std::string to_string(TimeSource source);

inline double selection_ms(const RoundRecord& r, TimeSource source) {
  return source == TimeSource::kWall ? r.selection_wall_ms
                                     : r.selection_modeled_ms;
}

inline constexpr const char* kMetricsHeader =
    "round,cohort,round_time_s,round_energy_j,cum_energy_j,global_acc,"
    "selection_wall_ms";

// Cohort ids are space separated inside their field.
void write_metrics_csv(std::ostream& out, std::span<const RoundRecord> records,
                       TimeSource source);

struct MetricsRow {
  std::size_t round = 0;
  std::vector<std::size_t> cohort;
  double round_time_s = 0.0;
  double round_energy_j = 0.0;
  double cum_energy_j = 0.0;
  double global_acc = 0.0;
  double selection_ms = 0.0;
};

// Throws ParseError naming the offending line.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

// round,client,mode_id,tau_s,energy_j,maxn_energy_j
void write_plan_csv(std::ostream& out, std::span<const RoundRecord> records);

struct SummaryOptions {
  double budget_j = 0.0;
  std::optional<double> target_energy_j;  // defaults to the budget
  std::optional<double> target_accuracy;
  double initial_accuracy = 0.0;
  TimeSource source = TimeSource::kModeled;
};

struct Summary {
  std::size_t rounds = 0;
  double total_energy_j = 0.0;
  double budget_j = 0.0;
  bool budget_violation = false;
  bool energy_monotone = true;
  double target_energy_j = 0.0;
  // Best global accuracy among rounds finishing within the target energy;
  // the initial accuracy when none does.
  double accuracy_at_target_energy = 0.0;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;
  double simulated_time_s = 0.0;
  double overhead_s = 0.0;
  std::optional<double> target_accuracy;
  std::optional<double> tta_s;
  std::optional<std::size_t> tta_round;
};

Summary summarize(std::span<const RoundRecord> records,
                  const SummaryOptions& options);

// JSON object; "status" is "no rounds" for an empty run and TTA is the
// string "unreached" when the target is never met.
std::string summary_json(const Summary& summary);

}  // namespace ebfl

#endif  // EBFL_METRICS_HPP_
