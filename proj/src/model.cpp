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

#include "ebfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {
namespace {

// Writes softmax(logits) into probs and returns log-sum-exp.
double softmax(std::span<const double> logits, std::span<double> probs) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    probs[k] = std::exp(logits[k] - peak);
    total += probs[k];
  }
  for (auto& p : probs) p /= total;
  return peak + std::log(total);
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp") return ModelKind::kMlp;
  throw ValidationError("unknown model kind '" + name + "'");
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "mlp";
}

std::size_t ModelSpec::parameter_count() const {
  const auto c = static_cast<std::size_t>(num_classes);
  if (kind == ModelKind::kLogistic) return c * (input_dim + 1);
  return hidden * (input_dim + 1) + c * (hidden + 1);
}

void ModelSpec::validate() const {
  if (input_dim == 0 || num_classes < 2) {
    throw ValidationError("model needs input_dim > 0 and >= 2 classes");
  }
  if (kind == ModelKind::kMlp && hidden == 0) {
    throw ValidationError("mlp model needs hidden > 0");
  }
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ModelParams p;
  p.values.assign(spec.parameter_count(), 0.0);
  if (spec.kind == ModelKind::kMlp) {
    Rng rng(seed);
    std::normal_distribution<double> normal(
        0.0, 1.0 / std::sqrt(static_cast<double>(spec.input_dim)));
    for (std::size_t i = 0; i < spec.hidden * spec.input_dim; ++i) {
      p.values[i] = normal(rng);
    }
    std::normal_distribution<double> out(
        0.0, 1.0 / std::sqrt(static_cast<double>(spec.hidden)));
    const std::size_t w2 = spec.hidden * (spec.input_dim + 1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(spec.num_classes) *
                                    spec.hidden;
         ++i) {
      p.values[w2 + i] = out(rng);
    }
  }
  return p;
}

void forward(const ModelSpec& spec, std::span<const double> params,
             std::span<const double> x, std::span<double> logits) {
  const std::size_t d = spec.input_dim;
  const auto c = static_cast<std::size_t>(spec.num_classes);
  if (spec.kind == ModelKind::kLogistic) {
    const double* w = params.data();
    const double* b = w + c * d;
    for (std::size_t k = 0; k < c; ++k) {
      double z = b[k];
      const double* wk = w + k * d;
      for (std::size_t j = 0; j < d; ++j) z += wk[j] * x[j];
      logits[k] = z;
    }
    return;
  }
  const std::size_t h = spec.hidden;
  const double* w1 = params.data();
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  const double* b2 = w2 + c * h;
  std::vector<double> act(h);
  for (std::size_t u = 0; u < h; ++u) {
    double z = b1[u];
    for (std::size_t j = 0; j < d; ++j) z += w1[u * d + j] * x[j];
    act[u] = std::tanh(z);
  }
  for (std::size_t k = 0; k < c; ++k) {
    double z = b2[k];
    for (std::size_t u = 0; u < h; ++u) z += w2[k * h + u] * act[u];
    logits[k] = z;
  }
}

double loss_and_gradient(const ModelSpec& spec, std::span<const double> params,
                         const LabeledDataset& data,
                         std::span<const std::size_t> batch,
                         std::vector<double>& grad) {
  const std::size_t d = spec.input_dim;
  const auto c = static_cast<std::size_t>(spec.num_classes);
  grad.assign(spec.parameter_count(), 0.0);
  if (batch.empty()) return 0.0;

  std::vector<double> logits(c), probs(c);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());

  if (spec.kind == ModelKind::kLogistic) {
    double* gw = grad.data();
    double* gb = gw + c * d;
    for (const std::size_t i : batch) {
      const auto x = data.row(i);
      const auto y = static_cast<std::size_t>(data.labels[i]);
      forward(spec, params, x, logits);
      loss += softmax(logits, probs) - logits[y];
      for (std::size_t k = 0; k < c; ++k) {
        const double delta = (probs[k] - (k == y ? 1.0 : 0.0)) * scale;
        double* gwk = gw + k * d;
        for (std::size_t j = 0; j < d; ++j) gwk[j] += delta * x[j];
        gb[k] += delta;
      }
    }
    return loss * scale;
  }

  const std::size_t h = spec.hidden;
  const double* w1 = params.data();
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  double* gw1 = grad.data();
  double* gb1 = gw1 + h * d;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + c * h;
  std::vector<double> act(h), back(h);
  for (const std::size_t i : batch) {
    const auto x = data.row(i);
    const auto y = static_cast<std::size_t>(data.labels[i]);
    for (std::size_t u = 0; u < h; ++u) {
      double z = b1[u];
      for (std::size_t j = 0; j < d; ++j) z += w1[u * d + j] * x[j];
      act[u] = std::tanh(z);
    }
    const double* b2 = w2 + c * h;
    for (std::size_t k = 0; k < c; ++k) {
      double z = b2[k];
      for (std::size_t u = 0; u < h; ++u) z += w2[k * h + u] * act[u];
      logits[k] = z;
    }
    loss += softmax(logits, probs) - logits[y];
    std::fill(back.begin(), back.end(), 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      const double delta = (probs[k] - (k == y ? 1.0 : 0.0)) * scale;
      for (std::size_t u = 0; u < h; ++u) {
        gw2[k * h + u] += delta * act[u];
        back[u] += delta * w2[k * h + u];
      }
      gb2[k] += delta;
    }
    for (std::size_t u = 0; u < h; ++u) {
      const double dz = back[u] * (1.0 - act[u] * act[u]);
      for (std::size_t j = 0; j < d; ++j) gw1[u * d + j] += dz * x[j];
      gb1[u] += dz;
    }
  }
  return loss * scale;
}

}  // namespace ebfl
