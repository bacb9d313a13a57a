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

#ifndef EBFL_CONFIG_HPP_
#define EBFL_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ebfl/fl_core.hpp"
#include "ebfl/metrics.hpp"
#include "ebfl/model.hpp"
#include "ebfl/strategies.hpp"

namespace ebfl {

// Environment variables named EBFL_<SECTION>__<KEY> override config keys;
// "__" separates nesting levels, e.g. EBFL_STRATEGY__GAMMA=4.
inline constexpr std::string_view kEnvPrefix = "EBFL_";

struct DatasetConfig {
  int classes = 8;
  std::size_t dim = 32;
  std::size_t samples = 8000;
  double separation = 1.5;
  double validation_fraction = 0.2;
};

struct PartitionConfig {
  std::string kind = "dirichlet";  // dirichlet | shard
  double alpha = 0.05;
  std::size_t labels_per_client = 2;
};

struct ProfileConfig {
  std::string file;  // CSV traces; synthetic profiles when empty
  int modes = 90;
  bool noise = false;
  double time_scale = 1.0;
  double power_scale = 1.0;
};

struct CoresetConfig {
  std::string mode = "auto";  // auto (fedj_k only) | on | off
  double ratio = 0.1;
  std::size_t min_per_class = 5;

  bool enabled_for(const std::string& strategy) const;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::vector<std::pair<std::string, std::size_t>> cluster{
      {"agx_xavier", 3}, {"orin_agx", 3}, {"orin_nano", 3}, {"xavier_nx", 3}};
  std::string workload = "synth";
  ProfileConfig profiles;
  DatasetConfig dataset;
  PartitionConfig partition;
  ModelKind model = ModelKind::kLogistic;
  std::size_t hidden = 16;
  TrainConfig train{2, 32, 0.1, 0};
  StrategyConfig strategy;
  CoresetConfig coreset;
  double budget_j = 40000.0;
  std::optional<double> target_energy_j;
  std::optional<double> target_accuracy;
  double accuracy_scale = 100.0;  // local accuracy -> percent for cooldown
  std::size_t workers = 1;
  std::size_t max_rounds = 1000;
  TimeSource time_source = TimeSource::kModeled;
  double modeled_ns_per_op = 1.0;

  std::size_t client_count() const;
  void validate() const;
};

// Parses a JSON document; unknown keys are rejected. `env` maps
// EBFL_-prefixed variable names to values.
ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& env = {});
ExperimentConfig load_config_file(const std::string& path, bool use_env = true);

// EBFL_-prefixed variables of the current process.
std::map<std::string, std::string> environment_overrides();

std::string config_to_json(const ExperimentConfig& config);

}  // namespace ebfl

#endif  // EBFL_CONFIG_HPP_
