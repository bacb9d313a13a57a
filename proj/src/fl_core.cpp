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

#include "ebfl/fl_core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "ebfl/csv.hpp"
#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {

void TrainConfig::validate() const {
  if (local_epochs < 1) throw ValidationError("local_epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be > 0");
  }
}

std::uint64_t next_epoch_seed(std::uint64_t seed) {
  std::uint64_t state = seed;
  return splitmix64(state);
}

ModelParams local_train(const ModelSpec& spec, const ModelParams& initial,
                        const LabeledDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw ValidationError("local_train: empty partition");
  if (initial.size() != spec.parameter_count()) {
    throw ValidationError("local_train: parameter dimension mismatch");
  }
  ModelParams w = initial;
  std::vector<std::size_t> order(data.size());
  std::vector<double> grad;
  std::uint64_t epoch_seed = config.seed;
  for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(epoch_seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      loss_and_gradient(spec, w.values, data,
                        std::span(order).subspan(start, len), grad);
      for (std::size_t k = 0; k < grad.size(); ++k) {
        w.values[k] -= config.learning_rate * grad[k];
      }
    }
    for (const double v : w.values) {
      if (!std::isfinite(v)) {
        throw NumericDivergenceError("local_train: non-finite parameter",
                                     epoch + 1);
      }
    }
    epoch_seed = next_epoch_seed(epoch_seed);
  }
  return w;
}

ModelParams fedavg_aggregate(std::span<const ModelContribution> models) {
  if (models.empty()) throw ValidationError("fedavg: no models");
  const std::size_t dim = models.front().params->size();
  double total = 0.0;
  for (const auto& m : models) {
    if (m.params == nullptr || m.params->size() != dim) {
      throw ValidationError("fedavg: dimension mismatch");
    }
    if (m.sample_count == 0) throw ValidationError("fedavg: zero sample count");
    total += static_cast<double>(m.sample_count);
  }
  ModelParams out;
  out.values.assign(dim, 0.0);
  for (const auto& m : models) {
    const double weight = static_cast<double>(m.sample_count) / total;
    const auto& v = m.params->values;
    for (std::size_t k = 0; k < dim; ++k) out.values[k] += weight * v[k];
  }
  return out;
}

Evaluation evaluate(const ModelSpec& spec, const ModelParams& params,
                    const LabeledDataset& data) {
  if (data.empty()) throw ValidationError("evaluate: empty dataset");
  const auto c = static_cast<std::size_t>(spec.num_classes);
  std::vector<double> logits(c);
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    forward(spec, params.values, data.row(i), logits);
    const auto best = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    const auto y = static_cast<std::size_t>(data.labels[i]);
    if (best == y) ++correct;
    const double peak = logits[best];
    double total = 0.0;
    for (const double z : logits) total += std::exp(z - peak);
    loss += peak + std::log(total) - logits[y];
  }
  const auto n = static_cast<double>(data.size());
  return {static_cast<double>(correct) / n, loss / n};
}

void save_checkpoint(std::ostream& out, const ModelParams& params,
                     const std::string& workload) {
  out << params.size() << ',' << workload << '\n';
  for (const double v : params.values) out << fmt::format("{:.17g}\n", v);
  if (!out) throw IoError("failed to write checkpoint");
}

ModelParams load_checkpoint(std::istream& in, std::string* workload) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing checkpoint header", 1);
  const auto header = csv::split(line);
  if (header.size() != 2) throw ParseError("expected '<dim>,<workload>'", 1);
  const auto dim =
      static_cast<std::size_t>(csv::parse_int(header[0], 1, "dimension"));
  if (workload) *workload = std::string(header[1]);
  ModelParams p;
  p.values.reserve(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    p.values.push_back(csv::parse_double(line, line_no, "value"));
  }
  if (p.values.size() != dim) {
    throw ParseError(fmt::format("header says {} values, found {}", dim,
                                 p.values.size()),
                     line_no);
  }
  return p;
}

}  // namespace ebfl
