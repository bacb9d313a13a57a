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

#ifndef EBFL_MODEL_HPP_
#define EBFL_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ebfl/dataset.hpp"

namespace ebfl {

enum class ModelKind { kLogistic, kMlp };

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

// Multinomial logistic regression, or one tanh hidden layer followed by a
// softmax layer. Flat parameter layout:
//   logistic: W[classes][input], b[classes]
//   mlp:      W1[hidden][input], b1[hidden], W2[classes][hidden], b2[classes]
struct ModelSpec {
  ModelKind kind = ModelKind::kLogistic;
  std::size_t input_dim = 0;
  int num_classes = 0;
  std::size_t hidden = 0;

  std::size_t parameter_count() const;
  void validate() const;
};

struct ModelParams {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const ModelParams&) const = default;
};

// Zeros for the logistic model; small Gaussian first layer for the MLP.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

// Class scores for one sample. `logits` must hold num_classes entries.
void forward(const ModelSpec& spec, std::span<const double> params,
             std::span<const double> x, std::span<double> logits);

// Mean cross-entropy over `batch` (indices into data) and its gradient,
// written into `grad` (resized to parameter_count()).
double loss_and_gradient(const ModelSpec& spec, std::span<const double> params,
                         const LabeledDataset& data,
                         std::span<const std::size_t> batch,
                         std::vector<double>& grad);

}  // namespace ebfl

#endif  // EBFL_MODEL_HPP_
