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

#ifndef EBFL_DATASET_HPP_
#define EBFL_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace ebfl {

// Dense row-major samples with integer class labels in [0, num_classes).
struct LabeledDataset {
  std::size_t dim = 0;
  int num_classes = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  LabeledDataset subset(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;

  // Throws ValidationError on an empty set, bad labels or ragged features.
  void validate() const;
};

// Gaussian class clusters. `class_separation` scales the distance between
// class means; 0 makes labels independent of the features. Labels are
// balanced (counts differ by at most one).
LabeledDataset synthesize_dataset(int classes, std::size_t dim,
                                  std::size_t samples, double class_separation,
                                  std::uint64_t seed);

// Random split into (first: size - holdout, second: holdout) samples.
std::pair<LabeledDataset, LabeledDataset> split_holdout(
    const LabeledDataset& data, std::size_t holdout, std::uint64_t seed);

// CSV with columns x0..x{d-1},label.
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);

}  // namespace ebfl

#endif  // EBFL_DATASET_HPP_
