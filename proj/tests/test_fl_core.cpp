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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ebfl/dataset.hpp"
#include "ebfl/error.hpp"
#include "ebfl/fl_core.hpp"
#include "ebfl/model.hpp"

namespace ebfl {
namespace {

ModelSpec logistic(std::size_t dim, int classes) {
  return {ModelKind::kLogistic, dim, classes, 0};
}

LabeledDataset toy_separable() {
  LabeledDataset d;
  d.dim = 2;
  d.num_classes = 2;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int i = 0; i < 200; ++i) {
    const int y = i % 2;
    const double cx = y == 0 ? -2.0 : 2.0;
    d.features.push_back(cx + noise(rng));
    d.features.push_back(noise(rng));
    d.labels.push_back(y);
  }
  return d;
}

TEST(LocalTrain, TinyStepLeavesWeights) {
  const auto data = toy_separable();
  const auto spec = logistic(2, 2);
  ModelParams w{{0.3, -0.1, 0.2, 0.5, -0.4, 0.1}};
  const auto out = local_train(spec, w, data, {3, 8, 1e-14, 1});
  for (std::size_t k = 0; k < w.size(); ++k) {
    EXPECT_NEAR(out.values[k], w.values[k], 1e-12);
  }
}

TEST(LocalTrain, SeparableToyConverges) {
  const auto data = toy_separable();
  const auto spec = logistic(2, 2);
  const auto out = local_train(spec, init_params(spec, 1), data, {50, 16, 0.1, 2});
  EXPECT_GT(evaluate(spec, out, data).accuracy, 0.95);
}

TEST(LocalTrain, MlpLearnsToy) {
  const auto data = toy_separable();
  const ModelSpec spec{ModelKind::kMlp, 2, 2, 8};
  const auto out = local_train(spec, init_params(spec, 1), data, {50, 16, 0.1, 2});
  EXPECT_GT(evaluate(spec, out, data).accuracy, 0.95);
}

TEST(LocalTrain, DeterministicAndInputUntouched) {
  const auto data = synthesize_dataset(4, 6, 300, 1.0, 8);
  const auto spec = logistic(6, 4);
  const auto w0 = init_params(spec, 1);
  const auto copy = w0;
  const TrainConfig cfg{2, 32, 0.1, 77};
  const auto a = local_train(spec, w0, data, cfg);
  const auto b = local_train(spec, w0, data, cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(w0, copy);
}

TEST(LocalTrain, EpochsChainSeeds) {
  const auto data = synthesize_dataset(3, 4, 120, 1.0, 2);
  const ModelSpec spec{ModelKind::kMlp, 4, 3, 5};
  const auto w0 = init_params(spec, 4);
  const auto three = local_train(spec, w0, data, {3, 10, 0.05, 99});
  auto step = w0;
  std::uint64_t seed = 99;
  for (int e = 0; e < 3; ++e) {
    step = local_train(spec, step, data, {1, 10, 0.05, seed});
    seed = next_epoch_seed(seed);
  }
  EXPECT_EQ(three, step);
}

TEST(LocalTrain, DivergenceNamesEpoch) {
  auto data = toy_separable();
  for (auto& x : data.features) x *= 1e6;
  const auto spec = logistic(2, 2);
  try {
    local_train(spec, init_params(spec, 1), data, {3, 8, 1e305, 1});
    FAIL() << "expected divergence";
  } catch (const NumericDivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1);
  }
}

TEST(LocalTrain, RejectsBadConfig) {
  const auto data = toy_separable();
  const auto spec = logistic(2, 2);
  const auto w = init_params(spec, 1);
  EXPECT_THROW(local_train(spec, w, data, {0, 8, 0.1, 1}), ValidationError);
  EXPECT_THROW(local_train(spec, w, data, {1, 0, 0.1, 1}), ValidationError);
  EXPECT_THROW(local_train(spec, w, data, {1, 8, 0.0, 1}), ValidationError);
}

TEST(FedAvg, WeightedMean) {
  const ModelParams a{{0.0, 0.0}};
  const ModelParams b{{4.0, 4.0}};
  const ModelContribution in[] = {{&a, 1}, {&b, 3}};
  EXPECT_EQ(fedavg_aggregate(in).values, (std::vector<double>{3.0, 3.0}));
}

TEST(FedAvg, SingleAndSymmetric) {
  const ModelParams a{{1.5, -2.0}};
  const ModelParams neg{{-1.5, 2.0}};
  const ModelContribution one[] = {{&a, 7}};
  EXPECT_EQ(fedavg_aggregate(one), a);
  const ModelContribution pair[] = {{&a, 5}, {&neg, 5}};
  for (double v : fedavg_aggregate(pair).values) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(FedAvg, Errors) {
  const ModelParams a{{1.0}};
  const ModelParams b{{1.0, 2.0}};
  const ModelContribution mismatch[] = {{&a, 1}, {&b, 1}};
  EXPECT_THROW(fedavg_aggregate(mismatch), ValidationError);
  const ModelContribution zero[] = {{&a, 0}};
  EXPECT_THROW(fedavg_aggregate(zero), ValidationError);
  EXPECT_THROW(fedavg_aggregate({}), ValidationError);
}

TEST(FedAvg, CopiesAndOrderInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-5, 5);
  std::uniform_int_distribution<std::size_t> count(1, 500);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + trial % 6;
    std::vector<ModelParams> models(k);
    for (auto& m : models) {
      m.values.resize(5);
      for (auto& v : m.values) v = val(rng);
    }
    std::vector<ModelContribution> in;
    std::vector<ModelContribution> copies;
    for (std::size_t i = 0; i < k; ++i) {
      in.push_back({&models[i], count(rng)});
      copies.push_back({&models[0], count(rng)});
    }
    const auto fwd = fedavg_aggregate(in);
    std::vector<ModelContribution> rev(in.rbegin(), in.rend());
    const auto back = fedavg_aggregate(rev);
    const auto same = fedavg_aggregate(copies);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(fwd.values[j], back.values[j], 1e-12);
      EXPECT_NEAR(same.values[j], models[0].values[j], 1e-12);
    }
  }
}

TEST(Evaluate, ZeroLogisticIsUniform) {
  const auto data = synthesize_dataset(5, 3, 100, 1.0, 1);
  const auto spec = logistic(3, 5);
  const auto e = evaluate(spec, init_params(spec, 1), data);
  EXPECT_NEAR(e.loss, std::log(5.0), 1e-12);
}

TEST(Evaluate, PerfectFitOnePointPerClass) {
  LabeledDataset d;
  d.dim = 3;
  d.num_classes = 3;
  d.features = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  d.labels = {0, 1, 2};
  const auto spec = logistic(3, 3);
  ModelParams w{{5, 0, 0, 0, 5, 0, 0, 0, 5, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(evaluate(spec, w, d).accuracy, 1.0);
}

TEST(Evaluate, ChanceWithoutSignal) {
  const auto data = synthesize_dataset(4, 8, 4000, 0.0, 5);
  const auto spec = logistic(8, 4);
  const auto w = local_train(spec, init_params(spec, 1), data, {2, 32, 0.05, 1});
  const auto hold = synthesize_dataset(4, 8, 4000, 0.0, 6);
  EXPECT_NEAR(evaluate(spec, w, hold).accuracy, 0.25, 0.05);
}

TEST(Evaluate, SeparationTwoReachesNinety) {
  const auto all = synthesize_dataset(8, 32, 8000, 2.0, 1);
  const auto [train, hold] = split_holdout(all, 1600, 2);
  const auto spec = logistic(32, 8);
  const auto w = local_train(spec, init_params(spec, 1), train, {5, 32, 0.1, 3});
  EXPECT_GT(evaluate(spec, w, hold).accuracy, 0.9);
}

double max_rel_gradient_error(const ModelSpec& spec, std::uint64_t seed) {
  const auto data = synthesize_dataset(spec.num_classes, spec.input_dim, 12,
                                       1.0, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> w(spec.parameter_count());
  for (auto& v : w) v = g(rng);
  std::vector<std::size_t> batch(data.size());
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = i;
  std::vector<double> grad;
  loss_and_gradient(spec, w, data, batch, grad);
  std::vector<double> scratch;
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t k = 0; k < w.size(); ++k) {
    auto up = w;
    auto down = w;
    up[k] += h;
    down[k] -= h;
    const double fd = (loss_and_gradient(spec, up, data, batch, scratch) -
                       loss_and_gradient(spec, down, data, batch, scratch)) /
                      (2 * h);
    const double rel =
        std::abs(fd - grad[k]) / std::max(1e-8, std::abs(fd) + std::abs(grad[k]));
    worst = std::max(worst, rel);
  }
  return worst;
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EXPECT_LT(max_rel_gradient_error(logistic(4, 3), seed), 1e-5);
    EXPECT_LT(max_rel_gradient_error({ModelKind::kMlp, 3, 3, 4}, seed), 1e-5);
  }
}

TEST(Checkpoint, RoundTrip) {
  const ModelParams w{{0.1, -2.5e-17, 3.0}};
  std::stringstream buf;
  save_checkpoint(buf, w, "lstm");
  std::string workload;
  EXPECT_EQ(load_checkpoint(buf, &workload), w);
  EXPECT_EQ(workload, "lstm");
}

TEST(Checkpoint, TruncatedIsParseError) {
  std::istringstream in("3,lstm\n0.1\n0.2\n");
  EXPECT_THROW(load_checkpoint(in), ParseError);
}

TEST(ModelKindNames, RoundTrip) {
  EXPECT_EQ(parse_model_kind("mlp"), ModelKind::kMlp);
  EXPECT_EQ(to_string(ModelKind::kLogistic), "logistic");
  EXPECT_THROW(parse_model_kind("cnn"), ValidationError);
}

}  // namespace
}  // namespace ebfl
