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

#ifndef EBFL_STRATEGIES_HPP_
#define EBFL_STRATEGIES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebfl/dataset.hpp"
#include "ebfl/device_model.hpp"
#include "ebfl/model.hpp"
#include "ebfl/selector.hpp"
#include "ebfl/shapley.hpp"

namespace ebfl {

struct ClientView {
  std::size_t client = 0;
  double maxn_time_s = 0.0;
  double maxn_energy_j = 0.0;
  const ParetoFront* front = nullptr;
};

struct RoundContext {
  std::size_t round = 1;  // 1-based
  double remaining_budget_j = 0.0;
  std::span<const ClientView> clients;  // indexed by client id
  std::span<const int> cooldown;        // empty when cooldown is off
};

struct RoundOutcome {
  std::size_t round = 1;
  std::span<const std::size_t> cohort;
  std::span<const ModelParams> local_models;  // aligned with cohort
  std::span<const std::size_t> sample_counts;
  std::span<const double> local_loss;
  const ModelParams* previous_global = nullptr;
};

struct StrategyConfig {
  std::string name = "fedj_k";
  std::size_t gamma = 6;
  double alpha = 0.7;
  double beta = 0.5;
  double rho = 0.02;
  std::optional<bool> cooldown;  // default: on for the FedJoule variants
  std::size_t exhaustive_cap = kDefaultExhaustiveCap;
  double escs_loss_weight = 1.0;
  double escs_time_weight = 1.0;

  void validate() const;
};

// What the Shapley-based strategies need to score cohorts.
struct EvaluationEnv {
  ModelSpec spec;
  const LabeledDataset* eval_set = nullptr;
  std::size_t workers = 1;
};

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::string name() const = 0;

  // Cohort of client ids, ascending; empty means infeasible.
  virtual std::vector<std::size_t> select(const RoundContext& ctx) = 0;

  // MAXN for every member unless overridden.
  virtual std::vector<ModeAssignment> assign_modes(
      std::span<const std::size_t> cohort, const RoundContext& ctx);

  virtual void observe(const RoundOutcome& outcome) { (void)outcome; }

  virtual bool uses_cooldown() const { return false; }
  virtual const ShapleyLedger* ledger() const { return nullptr; }

  // select + assign_modes with round time and energy filled in.
  std::optional<SelectionPlan> plan(const RoundContext& ctx);

  std::size_t utility_evaluations() const { return evaluations_; }
  // Abstract cost of selection and scoring so far (multiply-adds and
  // search nodes); deterministic per seed.
  std::uint64_t work_units() const { return work_units_; }
  const std::vector<std::string>& log() const { return log_; }

 protected:
  std::size_t evaluations_ = 0;
  std::uint64_t work_units_ = 0;
  std::vector<std::string> log_;
};

// Random permutation of `eligible`.
std::vector<std::size_t> random_order(std::span<const std::size_t> eligible,
                                      std::uint64_t seed);

// Sequential draws without replacement, proportional to weights[client].
// Zero-weight clients follow in random order; if every weight is zero the
// order is uniform and *fell_back is set.
std::vector<std::size_t> weighted_order(std::span<const std::size_t> eligible,
                                        std::span<const double> weights,
                                        std::uint64_t seed,
                                        bool* fell_back = nullptr);

// Walks `order` keeping clients whose MAXN energy still fits; stops at gamma.
std::vector<std::size_t> fit_budget(std::span<const std::size_t> order,
                                    std::span<const ClientView> clients,
                                    double budget_j, std::size_t gamma);

std::vector<std::size_t> rnd_select(std::span<const std::size_t> eligible,
                                    std::size_t gamma, std::uint64_t seed);

std::vector<std::size_t> shapley_weighted_select(
    std::span<const std::size_t> eligible, std::span<const double> weights,
    std::size_t gamma, std::uint64_t seed);

// Clients ranked by loss_weight * L/max(L) - time_weight * tau/max(tau),
// ties by id. Throws ValidationError for a client without a loss.
std::vector<std::size_t> escs_rank(std::span<const std::size_t> eligible,
                                   const std::map<std::size_t, double>& losses,
                                   std::span<const double> times,
                                   double loss_weight = 1.0,
                                   double time_weight = 1.0);

std::vector<std::size_t> escs_select(
    std::span<const std::size_t> eligible,
    const std::map<std::size_t, double>& losses, std::span<const double> times,
    std::size_t gamma);

// Builds one of rnd|exsh|ksh|escs|fedj_ex|fedj_k.
std::unique_ptr<Strategy> make_strategy(const StrategyConfig& config,
                                        std::size_t clients,
                                        const EvaluationEnv& env,
                                        std::uint64_t seed);

}  // namespace ebfl

#endif  // EBFL_STRATEGIES_HPP_
