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

#include "ebfl/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ebfl/error.hpp"

namespace ebfl {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return 1.0 - std::clamp(c, -1.0, 1.0);
}

CoresetSize coreset_size(std::size_t samples, int classes, double ratio,
                         std::size_t min_per_class) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError(
        fmt::format("coreset ratio must lie in (0, 1), got {}", ratio));
  }
  if (classes <= 0) throw ValidationError("class count must be positive");
  const auto k = static_cast<std::size_t>(classes);
  CoresetSize out;
  out.target = std::max(
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(samples))),
      k * min_per_class);
  out.per_class = std::max(out.target / k, min_per_class);
  return out;
}

std::vector<std::size_t> facility_location(std::span<const double> points,
                                           std::size_t dim, std::size_t count) {
  if (dim == 0) throw ValidationError("zero feature dimension");
  const std::size_t n = points.size() / dim;
  count = std::min(count, n);
  if (count == 0) return {};

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = points.subspan(i * dim, dim);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cosine_distance(a, points.subspan(j * dim, dim));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }

  std::size_t medoid = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += dist[i * n + j];
    if (sum < best_sum) {
      best_sum = sum;
      medoid = i;
    }
  }

  std::vector<std::size_t> picked{medoid};
  std::vector<bool> taken(n, false);
  taken[medoid] = true;
  std::vector<double> mu(dist.begin() + static_cast<std::ptrdiff_t>(medoid * n),
                         dist.begin() + static_cast<std::ptrdiff_t>((medoid + 1) * n));
  while (picked.size() < count) {
    std::size_t best = n;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double gain = 0.0;
      const double* row = &dist[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        gain += mu[j] - std::min(mu[j], row[j]);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    taken[best] = true;
    picked.push_back(best);
    for (std::size_t j = 0; j < n; ++j) {
      mu[j] = std::min(mu[j], dist[best * n + j]);
    }
  }
  return picked;
}

std::vector<std::size_t> coreset_indices(const LabeledDataset& data,
                                         double ratio,
                                         std::size_t min_per_class,
                                         const FeatureExtractor& extractor) {
  const CoresetSize size =
      coreset_size(data.size(), data.num_classes, ratio, min_per_class);

  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(data.num_classes));
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }

  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& members = by_class[c];
    if (members.empty()) {
      throw ValidationError(fmt::format("class {} has no samples", c));
    }
    std::vector<double> points;
    std::size_t dim = data.dim;
    for (const std::size_t i : members) {
      const auto row = data.row(i);
      if (extractor) {
        const auto emb = extractor(row);
        dim = emb.size();
        points.insert(points.end(), emb.begin(), emb.end());
      } else {
        points.insert(points.end(), row.begin(), row.end());
      }
    }
    for (const std::size_t local :
         facility_location(points, dim, size.per_class)) {
      out.push_back(members[local]);
    }
  }
  return out;
}

LabeledDataset build_coreset(const LabeledDataset& data, double ratio,
                             std::size_t min_per_class,
                             const FeatureExtractor& extractor) {
  const auto idx = coreset_indices(data, ratio, min_per_class, extractor);
  return data.subset(idx);
}

}  // namespace ebfl
