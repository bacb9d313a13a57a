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

#include "ebfl/metrics.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ebfl/csv.hpp"
#include "ebfl/error.hpp"

namespace ebfl {

TimeSource parse_time_source(const std::string& name) {
  if (name == "modeled") return TimeSource::kModeled;
  if (name == "wall") return TimeSource::kWall;
  throw ValidationError(
      fmt::format("selection time source must be modeled|wall, got '{}'", name));
}

std::string to_string(TimeSource source) {
  return source == TimeSource::kWall ? "wall" : "modeled";
}

void write_metrics_csv(std::ostream& out, std::span<const RoundRecord> records,
                       TimeSource source) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    std::string cohort;
    for (std::size_t k = 0; k < r.cohort.size(); ++k) {
      if (k > 0) cohort += ' ';
      cohort += std::to_string(r.cohort[k]);
    }
    out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.round,
                       cohort, r.round_time_s, r.energy_j, r.cum_energy_j,
                       r.global_acc, selection_ms(r, source));
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty metrics file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) {
    throw ParseError(fmt::format("unexpected metrics header '{}'", line), 1);
  }
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 7) {
      throw ParseError(fmt::format("expected 7 fields, got {}", f.size()),
                       lineno);
    }
    MetricsRow row;
    row.round = static_cast<std::size_t>(csv::parse_int(f[0], lineno, "round"));
    std::istringstream ids{std::string(f[1])};
    std::string tok;
    while (ids >> tok) {
      row.cohort.push_back(static_cast<std::size_t>(csv::parse_int(tok, lineno, "cohort")));
    }
    row.round_time_s = csv::parse_double(f[2], lineno, "round_time_s");
    row.round_energy_j = csv::parse_double(f[3], lineno, "round_energy_j");
    row.cum_energy_j = csv::parse_double(f[4], lineno, "cum_energy_j");
    row.global_acc = csv::parse_double(f[5], lineno, "global_acc");
    row.selection_ms = csv::parse_double(f[6], lineno, "selection_wall_ms");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_plan_csv(std::ostream& out, std::span<const RoundRecord> records) {
  out << "round,client,mode_id,tau_s,energy_j,maxn_energy_j\n";
  for (const auto& r : records) {
    for (const auto& m : r.modes) {
      out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", r.round, m.client,
                         m.mode_id, m.round_time_s, m.energy_j, m.maxn_energy_j);
    }
  }
}

Summary summarize(std::span<const RoundRecord> records,
                  const SummaryOptions& options) {
  Summary s;
  s.rounds = records.size();
  s.budget_j = options.budget_j;
  s.target_energy_j = options.target_energy_j.value_or(options.budget_j);
  s.target_accuracy = options.target_accuracy;
  s.accuracy_at_target_energy = options.initial_accuracy;
  s.final_accuracy = options.initial_accuracy;
  s.best_accuracy = options.initial_accuracy;

  double cum = 0.0;
  double clock = 0.0;
  for (const auto& r : records) {
    const double before = cum;
    cum += r.energy_j;
    if (!(cum > before)) s.energy_monotone = false;
    if (cum > options.budget_j) s.budget_violation = true;
    if (cum <= s.target_energy_j) {
      s.accuracy_at_target_energy =
          std::max(s.accuracy_at_target_energy, r.global_acc);
    }
    s.simulated_time_s += r.round_time_s;
    const double overhead = selection_ms(r, options.source) / 1000.0;
    s.overhead_s += overhead;
    clock += r.round_time_s + overhead;
    s.final_accuracy = r.global_acc;
    s.best_accuracy = std::max(s.best_accuracy, r.global_acc);
    if (options.target_accuracy && !s.tta_round &&
        r.global_acc >= *options.target_accuracy) {
      s.tta_round = r.round;
      s.tta_s = clock;
    }
  }
  s.total_energy_j = cum;
  return s;
}

std::string summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["status"] = s.rounds == 0 ? "no rounds" : "ok";
  j["rounds"] = s.rounds;
  j["total_energy_j"] = s.total_energy_j;
  j["budget_j"] = s.budget_j;
  j["budget_violation"] = s.budget_violation;
  j["energy_monotone"] = s.energy_monotone;
  j["target_energy_j"] = s.target_energy_j;
  j["accuracy_at_target_energy"] = s.accuracy_at_target_energy;
  j["final_accuracy"] = s.final_accuracy;
  j["best_accuracy"] = s.best_accuracy;
  j["simulated_time_s"] = s.simulated_time_s;
  j["overhead_s"] = s.overhead_s;
  if (s.target_accuracy) {
    j["target_accuracy"] = *s.target_accuracy;
  } else {
    j["target_accuracy"] = nullptr;
  }
  if (s.tta_s) {
    j["tta_s"] = *s.tta_s;
    j["tta_round"] = *s.tta_round;
  } else {
    j["tta_s"] = "unreached";
    j["tta_round"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace ebfl
