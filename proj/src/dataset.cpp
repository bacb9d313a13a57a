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

#include "ebfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.dim = dim;
  out.num_classes = num_classes;
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= size()) throw ValidationError("subset index out of range");
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void LabeledDataset::validate() const {
  if (labels.empty()) throw ValidationError("dataset is empty");
  if (dim == 0) throw ValidationError("dataset has zero feature dimension");
  if (num_classes < 1) throw ValidationError("dataset has no classes");
  if (features.size() != labels.size() * dim) {
    throw ValidationError("feature matrix does not match label count");
  }
  for (const int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw ValidationError(fmt::format("label {} outside [0, {})", y,
                                        num_classes));
    }
  }
}

LabeledDataset synthesize_dataset(int classes, std::size_t dim,
                                  std::size_t samples, double class_separation,
                                  std::uint64_t seed) {
  if (classes < 2) throw ValidationError("need at least 2 classes");
  if (dim < 2) throw ValidationError("need at least 2 feature dimensions");
  if (samples < static_cast<std::size_t>(classes)) {
    throw ValidationError("need at least one sample per class");
  }
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation)) {
    throw ValidationError("class_separation must be finite and >= 0");
  }

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Class means are random directions of length 2 * separation; the noise is
  // isotropic with unit variance.
  std::vector<double> means(static_cast<std::size_t>(classes) * dim);
  for (int c = 0; c < classes; ++c) {
    double norm = 0.0;
    double* mu = means.data() + static_cast<std::size_t>(c) * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      mu[j] = normal(rng);
      norm += mu[j] * mu[j];
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < dim; ++j) {
      mu[j] *= 2.0 * class_separation / norm;
    }
  }

  std::vector<int> labels(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    labels[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
  }
  std::shuffle(labels.begin(), labels.end(), rng);

  LabeledDataset data;
  data.dim = dim;
  data.num_classes = classes;
  data.labels = std::move(labels);
  data.features.resize(samples * dim);
  for (std::size_t i = 0; i < samples; ++i) {
    const double* mu =
        means.data() + static_cast<std::size_t>(data.labels[i]) * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      data.features[i * dim + j] = mu[j] + normal(rng);
    }
  }
  return data;
}

std::pair<LabeledDataset, LabeledDataset> split_holdout(
    const LabeledDataset& data, std::size_t holdout, std::uint64_t seed) {
  if (holdout == 0 || holdout >= data.size()) {
    throw ValidationError("holdout must be in (0, dataset size)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t keep = data.size() - holdout;
  std::vector<std::size_t> first(order.begin(), order.begin() + keep);
  std::vector<std::size_t> second(order.begin() + keep, order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {data.subset(first), data.subset(second)};
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  for (std::size_t j = 0; j < data.dim; ++j) out << 'x' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (const double v : data.row(i)) out << fmt::format("{:.17g},", v);
    out << data.labels[i] << '\n';
  }
}

}  // namespace ebfl
