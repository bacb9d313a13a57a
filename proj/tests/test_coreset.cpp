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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ebfl/coreset.hpp"
#include "ebfl/dataset.hpp"
#include "ebfl/error.hpp"

namespace ebfl {
namespace {

std::size_t brute_medoid(std::span<const double> pts, std::size_t dim) {
  const std::size_t n = pts.size() / dim;
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double a = pts[i * dim + k];
        const double b = pts[j * dim + k];
        dot += a * b;
        na += a * a;
        nb += b * b;
      }
      sum += 1.0 - dot / std::sqrt(na * nb);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

TEST(CoresetSize, TenPercentOfThousand) {
  const auto s = coreset_size(1000, 10, 0.1, 5);
  EXPECT_EQ(s.target, 100u);
  EXPECT_EQ(s.per_class, 10u);
}

TEST(CoresetSize, FloorBranch) {
  const auto s = coreset_size(200, 10, 0.1, 5);
  EXPECT_EQ(s.target, 50u);
  EXPECT_EQ(s.per_class, 5u);
}

TEST(CoresetSize, RatioValidated) {
  EXPECT_THROW(coreset_size(100, 2, 0.0, 1), ValidationError);
  EXPECT_THROW(coreset_size(100, 2, 1.0, 1), ValidationError);
  EXPECT_THROW(coreset_size(100, 2, -0.5, 1), ValidationError);
}

TEST(Cosine, ZeroVectorIsFar) {
  const double z[] = {0.0, 0.0};
  const double a[] = {1.0, 2.0};
  EXPECT_DOUBLE_EQ(cosine_distance(z, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, z), 1.0);
  EXPECT_NEAR(cosine_distance(a, a), 0.0, 1e-15);
}

TEST(FacilityLocation, MedoidOfThreeAngles) {
  const double deg = std::numbers::pi / 180.0;
  const double pts[] = {1.0, 0.0,
                        2 * std::cos(30 * deg), 2 * std::sin(30 * deg),
                        3 * std::cos(60 * deg), 3 * std::sin(60 * deg)};
  const auto picked = facility_location(pts, 2, 1);
  ASSERT_EQ(picked.size(), 1u);
  EXPECT_EQ(picked[0], 1u);
}

TEST(FacilityLocation, FirstPickIsMedoidOnRandomClouds) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.5, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + trial % 5;
    const std::size_t n = 3 + trial * 2;
    std::vector<double> pts(n * dim);
    for (auto& x : pts) x = g(rng);
    const auto picked = facility_location(pts, dim, 4);
    EXPECT_EQ(picked[0], brute_medoid(pts, dim));
    EXPECT_EQ(std::set<std::size_t>(picked.begin(), picked.end()).size(),
              picked.size());
  }
}

TEST(FacilityLocation, TiesGoToLowestIndex) {
  const double pts[] = {1, 0, 1, 0, 1, 0};
  EXPECT_EQ(facility_location(pts, 2, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(BuildCoreset, BalancedAndReproducible) {
  const auto data = synthesize_dataset(10, 8, 1000, 1.0, 3);
  const auto idx = coreset_indices(data, 0.1, 5);
  EXPECT_EQ(idx.size(), 100u);
  const auto core = build_coreset(data, 0.1, 5);
  for (auto c : core.class_counts()) EXPECT_EQ(c, 10u);
  EXPECT_EQ(idx, coreset_indices(data, 0.1, 5));
}

TEST(BuildCoreset, SmallClassTakenWhole) {
  LabeledDataset d;
  d.dim = 2;
  d.num_classes = 2;
  for (int i = 0; i < 40; ++i) {
    d.features.insert(d.features.end(), {1.0 + i, 2.0});
    d.labels.push_back(0);
  }
  d.features.insert(d.features.end(), {0.5, 1.0, 0.2, 3.0});
  d.labels.insert(d.labels.end(), {1, 1});
  const auto core = build_coreset(d, 0.5, 4);
  const auto counts = core.class_counts();
  EXPECT_EQ(counts[0], 10u);
  EXPECT_EQ(counts[1], 2u);
}

TEST(BuildCoreset, EmptyClassRejected) {
  LabeledDataset d;
  d.dim = 2;
  d.num_classes = 3;
  d.features = {1, 0, 0, 1};
  d.labels = {0, 2};
  EXPECT_THROW(build_coreset(d, 0.5, 1), ValidationError);
}

TEST(BuildCoreset, ExtractorChangesGeometry) {
  const auto data = synthesize_dataset(2, 4, 60, 1.0, 5);
  auto first_coord = [](std::span<const double> x) {
    return std::vector<double>{x[0], 1.0};
  };
  const auto plain = coreset_indices(data, 0.2, 2);
  const auto mapped = coreset_indices(data, 0.2, 2, first_coord);
  EXPECT_EQ(plain.size(), mapped.size());
  EXPECT_NE(plain, mapped);
}

}  // namespace
}  // namespace ebfl
