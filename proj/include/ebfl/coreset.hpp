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

#ifndef EBFL_CORESET_HPP_
#define EBFL_CORESET_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ebfl/dataset.hpp"

namespace ebfl {

// Maps a raw feature row to the embedding used for distances.
using FeatureExtractor =
    std::function<std::vector<double>(std::span<const double>)>;

// 1 - cos(a, b); a zero vector is at distance 1 from every other point.
double cosine_distance(std::span<const double> a, std::span<const double> b);

struct CoresetSize {
  std::size_t target = 0;     // N_target = max(floor(ratio * n), k * m_min)
  std::size_t per_class = 0;  // m = max(floor(N_target / k), m_min)
};

CoresetSize coreset_size(std::size_t samples, int classes, double ratio,
                         std::size_t min_per_class);

// Greedy facility location over `points` (row-major, `dim` columns). The
// first pick is the medoid; returns up to `count` indices in pick order.
std::vector<std::size_t> facility_location(std::span<const double> points,
                                           std::size_t dim, std::size_t count);

// Indices into `data`, grouped by class in ascending label order, each group
// in pick order.
std::vector<std::size_t> coreset_indices(
    const LabeledDataset& data, double ratio, std::size_t min_per_class,
    const FeatureExtractor& extractor = nullptr);

LabeledDataset build_coreset(const LabeledDataset& data, double ratio,
                             std::size_t min_per_class,
                             const FeatureExtractor& extractor = nullptr);

}  // namespace ebfl

#endif  // EBFL_CORESET_HPP_
