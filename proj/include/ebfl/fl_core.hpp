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

#ifndef EBFL_FL_CORE_HPP_
#define EBFL_FL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "ebfl/dataset.hpp"
#include "ebfl/model.hpp"

namespace ebfl {

struct TrainConfig {
  int local_epochs = 1;
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Seed of the epoch following one shuffled with `seed`. Training for k epochs
// with seed s equals k one-epoch calls with s, next_epoch_seed(s), ...
std::uint64_t next_epoch_seed(std::uint64_t seed);

// Minibatch SGD on mean cross-entropy. Throws NumericDivergenceError when a
// parameter stops being finite.
ModelParams local_train(const ModelSpec& spec, const ModelParams& initial,
                        const LabeledDataset& data, const TrainConfig& config);

struct ModelContribution {
  const ModelParams* params = nullptr;
  std::size_t sample_count = 0;
};

// Sample-count-weighted mean of the contributed models.
ModelParams fedavg_aggregate(std::span<const ModelContribution> models);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

// Top-1 accuracy (ties go to the lower class index) and mean cross-entropy.
Evaluation evaluate(const ModelSpec& spec, const ModelParams& params,
                    const LabeledDataset& data);

// Text checkpoint: "<dimension>,<workload>" then one value per line.
void save_checkpoint(std::ostream& out, const ModelParams& params,
                     const std::string& workload);
ModelParams load_checkpoint(std::istream& in, std::string* workload = nullptr);

}  // namespace ebfl

#endif  // EBFL_FL_CORE_HPP_
