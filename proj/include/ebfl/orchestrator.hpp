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

#ifndef EBFL_ORCHESTRATOR_HPP_
#define EBFL_ORCHESTRATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebfl/config.hpp"
#include "ebfl/data_partition.hpp"
#include "ebfl/dataset.hpp"
#include "ebfl/device_model.hpp"
#include "ebfl/metrics.hpp"
#include "ebfl/model.hpp"
#include "ebfl/strategies.hpp"

namespace ebfl {

struct SimClient {
  std::size_t id = 0;
  std::string device_type;
  std::size_t samples = 0;
  double scale = 1.0;  // max(0.1, samples / mean partition size)
  DeviceWorkloadProfile profile;  // already scaled
  ParetoFront front;
};

// Everything a run needs that does not depend on the strategy.
struct World {
  LabeledDataset train;
  LabeledDataset validation;
  PartitionAssignment partition;
  std::vector<LabeledDataset> client_data;
  std::vector<SimClient> clients;
  ModelSpec spec;
};

World build_world(const ExperimentConfig& config);

using StrategyFactory = std::function<std::unique_ptr<Strategy>(
    const ExperimentConfig&, std::size_t clients, const EvaluationEnv&,
    std::uint64_t seed)>;

struct RunOptions {
  // Replaces make_strategy; lets tests inject misbehaving strategies.
  StrategyFactory strategy_factory;
};

struct ExperimentResult {
  std::string strategy;
  std::vector<RoundRecord> records;
  double initial_accuracy = 0.0;
  std::optional<std::string> violation;
  std::string termination;
  std::size_t idle_ticks = 0;
  std::string ledger_csv;  // rows without header
  std::vector<std::string> log;
  ModelParams final_model;
  Summary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options = {});
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const World& world,
                                const RunOptions& options = {});

// metrics.csv, summary.json, plan.csv, shapley.csv, config.json and, when
// the strategy logged anything, events.log. Throws IoError.
void write_outputs(const ExperimentConfig& config,
                   const ExperimentResult& result, const std::string& dir);

}  // namespace ebfl

#endif  // EBFL_ORCHESTRATOR_HPP_
