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

#include "ebfl/strategies.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "ebfl/error.hpp"
#include "ebfl/fl_core.hpp"
#include "ebfl/random.hpp"

namespace ebfl {
namespace {

std::vector<std::size_t> eligible_clients(const RoundContext& ctx) {
  std::vector<std::size_t> out;
  for (const auto& c : ctx.clients) {
    if (ctx.cooldown.empty() || ctx.cooldown[c.client] == 0) {
      out.push_back(c.client);
    }
  }
  return out;
}

// Per-round Shapley scoring shared by ExSH, KSH and both FedJoule variants.
class ShapleyScorer {
 public:
  ShapleyScorer(std::size_t clients, double beta, bool exhaustive,
                std::size_t cap, EvaluationEnv env, std::uint64_t seed)
      : ledger_(clients, beta),
        exhaustive_(exhaustive),
        cap_(cap),
        env_(std::move(env)),
        seed_(seed) {
    if (env_.eval_set == nullptr) {
      throw ValidationError("Shapley scoring needs an evaluation set");
    }
  }

  const ShapleyLedger& ledger() const { return ledger_; }

  // Returns the number of utility evaluations.
  std::size_t score(const RoundOutcome& out, std::uint64_t& work,
                    std::vector<std::string>& log) {
    const std::size_t n = out.cohort.size();
    if (n == 0) return 0;
    if (out.previous_global == nullptr) {
      throw ValidationError("the previous global model is required");
    }
    if (out.local_models.size() != n || out.sample_counts.size() != n) {
      throw ValidationError("one local model per cohort member is required");
    }
    const std::uint64_t params = env_.spec.parameter_count();
    const std::uint64_t m = env_.eval_set->size();
    std::atomic<std::uint64_t> spent{0};
    CohortUtility util([&](Coalition s) {
      const auto k = static_cast<std::uint64_t>(std::popcount(s));
      spent += params * (k + m);
      if (s == 0) {
        return evaluate(env_.spec, *out.previous_global, *env_.eval_set).accuracy;
      }
      std::vector<ModelContribution> parts;
      for (std::size_t i = 0; i < n; ++i) {
        if (s >> i & 1) {
          parts.push_back({&out.local_models[i], out.sample_counts[i]});
        }
      }
      const ModelParams agg = fedavg_aggregate(parts);
      return evaluate(env_.spec, agg, *env_.eval_set).accuracy;
    });

    std::vector<double> phi;
    if (exhaustive_ && n <= cap_) {
      phi = exhaustive_shapley(util, n, cap_, env_.workers);
    } else {
      if (exhaustive_) {
        log.push_back(fmt::format(
            "round {}: cohort of {} above the exhaustive cap, using kernel "
            "Shapley",
            out.round, n));
      }
      const auto samples =
          sample_cohorts(n, derive_seed(seed_, kCohortSampleStream, out.round));
      phi = kernel_shapley(util, n, samples, env_.workers);
    }
    ledger_.record_round(out.cohort, phi);
    work += spent.load();
    return util.evaluations();
  }

 private:
  ShapleyLedger ledger_;
  bool exhaustive_;
  std::size_t cap_;
  EvaluationEnv env_;
  std::uint64_t seed_;
};

class RndStrategy final : public Strategy {
 public:
  RndStrategy(const StrategyConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), seed_(seed) {}

  std::string name() const override { return "rnd"; }
  bool uses_cooldown() const override { return cfg_.cooldown.value_or(false); }

  std::vector<std::size_t> select(const RoundContext& ctx) override {
    const auto eligible = eligible_clients(ctx);
    const auto order = random_order(eligible, derive_seed(seed_, ctx.round));
    auto out = fit_budget(order, ctx.clients, ctx.remaining_budget_j, cfg_.gamma);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  StrategyConfig cfg_;
  std::uint64_t seed_;
};

class WeightedShapleyStrategy final : public Strategy {
 public:
  WeightedShapleyStrategy(const StrategyConfig& cfg, std::size_t clients,
                          const EvaluationEnv& env, std::uint64_t seed,
                          bool exhaustive)
      : cfg_(cfg),
        seed_(seed),
        exhaustive_(exhaustive),
        scorer_(clients, cfg.beta, exhaustive, cfg.exhaustive_cap, env, seed) {}

  std::string name() const override { return exhaustive_ ? "exsh" : "ksh"; }
  bool uses_cooldown() const override { return cfg_.cooldown.value_or(false); }
  const ShapleyLedger* ledger() const override { return &scorer_.ledger(); }

  std::vector<std::size_t> select(const RoundContext& ctx) override {
    const auto eligible = eligible_clients(ctx);
    const auto weights = scorer_.ledger().surrogates();
    bool fell_back = false;
    const auto order = weighted_order(eligible, weights,
                                      derive_seed(seed_, ctx.round), &fell_back);
    if (fell_back) {
      log_.push_back(fmt::format(
          "round {}: all sampling weights are zero, sampling uniformly",
          ctx.round));
    }
    auto out = fit_budget(order, ctx.clients, ctx.remaining_budget_j, cfg_.gamma);
    std::sort(out.begin(), out.end());
    return out;
  }

  void observe(const RoundOutcome& outcome) override {
    evaluations_ += scorer_.score(outcome, work_units_, log_);
  }

 private:
  StrategyConfig cfg_;
  std::uint64_t seed_;
  bool exhaustive_;
  ShapleyScorer scorer_;
};

class EscsStrategy final : public Strategy {
 public:
  explicit EscsStrategy(const StrategyConfig& cfg) : cfg_(cfg) {}

  std::string name() const override { return "escs"; }
  bool uses_cooldown() const override { return cfg_.cooldown.value_or(false); }

  std::vector<std::size_t> select(const RoundContext& ctx) override {
    const auto eligible = eligible_clients(ctx);
    std::vector<double> times(ctx.clients.size(), 0.0);
    for (const auto& c : ctx.clients) times[c.client] = c.maxn_time_s;

    // Bootstrap: every client trains once before losses drive selection.
    std::vector<std::size_t> unseen;
    for (const std::size_t c : eligible) {
      if (!losses_.contains(c)) unseen.push_back(c);
    }
    std::vector<std::size_t> out;
    if (!unseen.empty()) {
      double total = 0.0;
      for (const std::size_t c : unseen) total += ctx.clients[c].maxn_energy_j;
      if (total <= ctx.remaining_budget_j) {
        out = unseen;
      } else {
        std::stable_sort(unseen.begin(), unseen.end(),
                         [&](std::size_t a, std::size_t b) {
                           return times[a] < times[b];
                         });
        out = fit_budget(unseen, ctx.clients, ctx.remaining_budget_j,
                         unseen.size());
        log_.push_back(fmt::format(
            "round {}: budget cannot cover every untrained client, "
            "bootstrapping {} of {} fastest first",
            ctx.round, out.size(), unseen.size()));
      }
    } else {
      const auto ranked = escs_rank(eligible, losses_, times,
                                    cfg_.escs_loss_weight, cfg_.escs_time_weight);
      out = fit_budget(ranked, ctx.clients, ctx.remaining_budget_j, cfg_.gamma);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void observe(const RoundOutcome& outcome) override {
    for (std::size_t k = 0; k < outcome.cohort.size(); ++k) {
      losses_[outcome.cohort[k]] = outcome.local_loss[k];
    }
  }

 private:
  StrategyConfig cfg_;
  std::map<std::size_t, double> losses_;
};

class FedJouleStrategy final : public Strategy {
 public:
  FedJouleStrategy(const StrategyConfig& cfg, std::size_t clients,
                   const EvaluationEnv& env, std::uint64_t seed, bool exhaustive)
      : cfg_(cfg),
        exhaustive_(exhaustive),
        scorer_(clients, cfg.beta, exhaustive, cfg.exhaustive_cap, env, seed) {}

  std::string name() const override {
    return exhaustive_ ? "fedj_ex" : "fedj_k";
  }
  bool uses_cooldown() const override { return cfg_.cooldown.value_or(true); }
  const ShapleyLedger* ledger() const override { return &scorer_.ledger(); }

  std::vector<std::size_t> select(const RoundContext& ctx) override {
    problem_ = SelectionProblem{};
    problem_.remaining_budget_j = ctx.remaining_budget_j;
    problem_.max_cohort = cfg_.gamma;
    problem_.alpha = cfg_.alpha;
    for (const auto& c : ctx.clients) {
      SelectionCandidate cand;
      cand.client = c.client;
      cand.surrogate = scorer_.ledger().surrogate(c.client);
      cand.maxn_time_s = c.maxn_time_s;
      cand.maxn_energy_j = c.maxn_energy_j;
      cand.front = c.front;
      cand.cooldown = ctx.cooldown.empty() ? 0 : ctx.cooldown[c.client];
      problem_.candidates.push_back(cand);
    }
    const auto sol = ilp_cs(problem_);
    if (!sol) return {};
    work_units_ += sol->nodes * problem_.candidates.size();
    round_time_ = sol->maxn_time_s;
    return sol->cohort;
  }

  std::vector<ModeAssignment> assign_modes(std::span<const std::size_t> cohort,
                                           const RoundContext&) override {
    return ilp_pm(problem_, cohort, round_time_);
  }

  void observe(const RoundOutcome& outcome) override {
    evaluations_ += scorer_.score(outcome, work_units_, log_);
  }

 private:
  StrategyConfig cfg_;
  bool exhaustive_;
  ShapleyScorer scorer_;
  SelectionProblem problem_;
  double round_time_ = 0.0;
};

}  // namespace

void StrategyConfig::validate() const {
  static const std::vector<std::string> kNames{"rnd",  "exsh",    "ksh",
                                               "escs", "fedj_ex", "fedj_k"};
  if (std::find(kNames.begin(), kNames.end(), name) == kNames.end()) {
    throw ValidationError(fmt::format(
        "unknown strategy '{}'; expected one of rnd|exsh|ksh|escs|fedj_ex|fedj_k",
        name));
  }
  if (gamma == 0) throw ValidationError("gamma must be >= 1");
  if (gamma > kMaxCohortBits) {
    throw ValidationError(fmt::format("gamma must be <= {}", kMaxCohortBits));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("beta must lie in [0, 1]");
  }
  if (!(rho >= 0.0)) throw ValidationError("rho must be non-negative");
  if (!(escs_loss_weight >= 0.0) || !(escs_time_weight >= 0.0)) {
    throw ValidationError("ESCS weights must be non-negative");
  }
}

std::vector<ModeAssignment> Strategy::assign_modes(
    std::span<const std::size_t> cohort, const RoundContext& ctx) {
  std::vector<ModeAssignment> out;
  for (const std::size_t c : cohort) {
    const ClientView& v = ctx.clients[c];
    ModeAssignment a;
    a.client = c;
    a.mode_id = v.front != nullptr ? v.front->fastest().mode_id : "maxn";
    a.round_time_s = v.maxn_time_s;
    a.energy_j = v.maxn_energy_j;
    a.maxn_energy_j = v.maxn_energy_j;
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<SelectionPlan> Strategy::plan(const RoundContext& ctx) {
  auto cohort = select(ctx);
  if (cohort.empty()) return std::nullopt;
  std::sort(cohort.begin(), cohort.end());
  SelectionPlan plan;
  plan.cohort = cohort;
  plan.modes = assign_modes(plan.cohort, ctx);
  for (const std::size_t c : plan.cohort) {
    plan.predicted_time_s =
        std::max(plan.predicted_time_s, ctx.clients[c].maxn_time_s);
    plan.maxn_energy_j += ctx.clients[c].maxn_energy_j;
  }
  for (const auto& m : plan.modes) {
    plan.round_time_s = std::max(plan.round_time_s, m.round_time_s);
    plan.energy_j += m.energy_j;
  }
  return plan;
}

std::vector<std::size_t> random_order(std::span<const std::size_t> eligible,
                                      std::uint64_t seed) {
  std::vector<std::size_t> out(eligible.begin(), eligible.end());
  Rng rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<std::size_t> weighted_order(std::span<const std::size_t> eligible,
                                        std::span<const double> weights,
                                        std::uint64_t seed, bool* fell_back) {
  if (fell_back != nullptr) *fell_back = false;
  std::vector<std::size_t> positive;
  std::vector<std::size_t> zero;
  for (const std::size_t c : eligible) {
    if (c >= weights.size()) {
      throw ValidationError(fmt::format("client {} has no weight", c));
    }
    if (weights[c] < 0.0) {
      throw ValidationError(fmt::format("client {} has a negative weight", c));
    }
    (weights[c] > 0.0 ? positive : zero).push_back(c);
  }
  Rng rng(seed);
  if (positive.empty()) {
    if (fell_back != nullptr && !zero.empty()) *fell_back = true;
    std::shuffle(zero.begin(), zero.end(), rng);
    return zero;
  }
  std::vector<std::size_t> out;
  out.reserve(eligible.size());
  while (!positive.empty()) {
    std::vector<double> w;
    w.reserve(positive.size());
    for (const std::size_t c : positive) w.push_back(weights[c]);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::size_t k = pick(rng);
    out.push_back(positive[k]);
    positive.erase(positive.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::shuffle(zero.begin(), zero.end(), rng);
  out.insert(out.end(), zero.begin(), zero.end());
  return out;
}

std::vector<std::size_t> fit_budget(std::span<const std::size_t> order,
                                    std::span<const ClientView> clients,
                                    double budget_j, std::size_t gamma) {
  std::vector<std::size_t> out;
  double used = 0.0;
  for (const std::size_t c : order) {
    if (out.size() >= gamma) break;
    const double e = clients[c].maxn_energy_j;
    if (used + e <= budget_j) {
      out.push_back(c);
      used += e;
    }
  }
  return out;
}

std::vector<std::size_t> rnd_select(std::span<const std::size_t> eligible,
                                    std::size_t gamma, std::uint64_t seed) {
  auto order = random_order(eligible, seed);
  order.resize(std::min(gamma, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> shapley_weighted_select(
    std::span<const std::size_t> eligible, std::span<const double> weights,
    std::size_t gamma, std::uint64_t seed) {
  auto order = weighted_order(eligible, weights, seed);
  order.resize(std::min(gamma, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> escs_rank(std::span<const std::size_t> eligible,
                                   const std::map<std::size_t, double>& losses,
                                   std::span<const double> times,
                                   double loss_weight, double time_weight) {
  double max_loss = 0.0;
  double max_time = 0.0;
  for (const std::size_t c : eligible) {
    const auto it = losses.find(c);
    if (it == losses.end()) {
      throw ValidationError(fmt::format("client {} has no recorded loss", c));
    }
    max_loss = std::max(max_loss, it->second);
    max_time = std::max(max_time, times[c]);
  }
  std::vector<std::pair<double, std::size_t>> scored;
  for (const std::size_t c : eligible) {
    const double l = max_loss > 0.0 ? losses.at(c) / max_loss : 0.0;
    const double t = max_time > 0.0 ? times[c] / max_time : 0.0;
    scored.emplace_back(loss_weight * l - time_weight * t, c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::size_t> out;
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

std::vector<std::size_t> escs_select(
    std::span<const std::size_t> eligible,
    const std::map<std::size_t, double>& losses, std::span<const double> times,
    std::size_t gamma) {
  auto ranked = escs_rank(eligible, losses, times);
  ranked.resize(std::min(gamma, ranked.size()));
  std::sort(ranked.begin(), ranked.end());
  return ranked;
}

std::unique_ptr<Strategy> make_strategy(const StrategyConfig& config,
                                        std::size_t clients,
                                        const EvaluationEnv& env,
                                        std::uint64_t seed) {
  config.validate();
  const std::string& n = config.name;
  if (n == "rnd") return std::make_unique<RndStrategy>(config, seed);
  if (n == "escs") return std::make_unique<EscsStrategy>(config);
  if (n == "exsh" || n == "ksh") {
    return std::make_unique<WeightedShapleyStrategy>(config, clients, env, seed,
                                                     n == "exsh");
  }
  return std::make_unique<FedJouleStrategy>(config, clients, env, seed,
                                            n == "fedj_ex");
}

}  // namespace ebfl
