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

#include "ebfl/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "ebfl/coreset.hpp"
#include "ebfl/error.hpp"
#include "ebfl/fl_core.hpp"
#include "ebfl/parallel.hpp"
#include "ebfl/random.hpp"
#include "ebfl/selector.hpp"

namespace ebfl {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<DeviceWorkloadProfile> load_or_synthesize(
    const ExperimentConfig& cfg) {
  if (!cfg.profiles.file.empty()) {
    auto profiles = load_profiles_file(cfg.profiles.file);
    if (cfg.profiles.noise) {
      ProfileGeneratorConfig defaults;
      profiles = perturb_profiles(profiles, defaults.time_noise,
                                  defaults.power_noise,
                                  derive_seed(cfg.seed, kProfileNoiseStream));
    }
    return profiles;
  }
  ProfileGeneratorConfig gen;
  const auto known = default_device_classes(cfg.profiles.modes);
  for (const auto& [name, count] : cfg.cluster) {
    const auto it = std::find_if(known.begin(), known.end(),
                                 [&](const auto& c) { return c.name == name; });
    if (it == known.end()) {
      throw ValidationError(fmt::format(
          "no synthetic class for device '{}'; supply profiles.file", name));
    }
    gen.classes.push_back(*it);
  }
  gen.workloads.push_back(
      {cfg.workload, cfg.profiles.time_scale, cfg.profiles.power_scale});
  gen.noise = cfg.profiles.noise;
  return synthesize_profiles(gen, derive_seed(cfg.seed, kProfileStream));
}

}  // namespace

World build_world(const ExperimentConfig& cfg) {
  cfg.validate();
  World w;
  const auto all = synthesize_dataset(
      cfg.dataset.classes, cfg.dataset.dim, cfg.dataset.samples,
      cfg.dataset.separation, derive_seed(cfg.seed, kDatasetStream));
  const auto holdout = static_cast<std::size_t>(std::llround(
      cfg.dataset.validation_fraction * static_cast<double>(all.size())));
  std::tie(w.train, w.validation) =
      split_holdout(all, holdout, derive_seed(cfg.seed, kDatasetStream, 1));

  const std::size_t n = cfg.client_count();
  const std::uint64_t part_seed = derive_seed(cfg.seed, kPartitionStream);
  if (cfg.partition.kind == "shard") {
    w.partition = shard_partition(w.train, n, cfg.partition.labels_per_client,
                                  static_cast<std::size_t>(cfg.dataset.classes),
                                  part_seed);
  } else {
    w.partition = dirichlet_partition(w.train, n, cfg.partition.alpha, part_seed);
  }
  for (const auto& idx : w.partition.members()) {
    w.client_data.push_back(w.train.subset(idx));
  }

  const auto profiles = load_or_synthesize(cfg);
  const double mean_size =
      static_cast<double>(w.train.size()) / static_cast<double>(n);
  std::size_t id = 0;
  for (const auto& [device, count] : cfg.cluster) {
    const auto& base = find_profile(profiles, device, cfg.workload);
    for (std::size_t k = 0; k < count; ++k, ++id) {
      SimClient c;
      c.id = id;
      c.device_type = device;
      c.samples = w.partition.client_size(id);
      c.scale = std::max(0.1, static_cast<double>(c.samples) / mean_size);
      c.profile = base.scaled(c.scale);
      c.front = extract_pareto(c.profile);
      w.clients.push_back(std::move(c));
    }
  }

  w.spec.kind = cfg.model;
  w.spec.input_dim = cfg.dataset.dim;
  w.spec.num_classes = cfg.dataset.classes;
  w.spec.hidden = cfg.hidden;
  w.spec.validate();
  return w;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  const World world = build_world(cfg);
  return run_experiment(cfg, world, options);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const World& world,
                                const RunOptions& options) {
  cfg.validate();
  const std::size_t n = world.clients.size();
  const ModelSpec& spec = world.spec;

  LabeledDataset coreset;
  EvaluationEnv env;
  env.spec = spec;
  env.workers = cfg.workers;
  env.eval_set = &world.validation;
  if (cfg.coreset.enabled_for(cfg.strategy.name)) {
    coreset = build_coreset(world.validation, cfg.coreset.ratio,
                            cfg.coreset.min_per_class);
    env.eval_set = &coreset;
  }

  const std::uint64_t strategy_seed = derive_seed(cfg.seed, kStrategyStream);
  std::unique_ptr<Strategy> strategy =
      options.strategy_factory
          ? options.strategy_factory(cfg, n, env, strategy_seed)
          : make_strategy(cfg.strategy, n, env, strategy_seed);

  ExperimentResult result;
  result.strategy = strategy->name();
  ModelParams global = init_params(spec, derive_seed(cfg.seed, kModelInitStream));
  result.initial_accuracy = evaluate(spec, global, world.validation).accuracy;

  std::vector<ClientView> views(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = world.clients[i];
    views[i] = {i, c.front.fastest().round_time_s, c.front.fastest().energy_j,
                &c.front};
  }

  const bool cooling = strategy->uses_cooldown();
  std::vector<int> cooldown(n, 0);
  std::vector<bool> trained(n, false);
  const double eval_ops = static_cast<double>(spec.parameter_count()) *
                          static_cast<double>(world.validation.size());
  double cum = 0.0;
  std::ostringstream ledger_rows;
  std::size_t round = 0;

  while (result.records.size() < cfg.max_rounds) {
    const double remaining = cfg.budget_j - cum;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < n; ++i) {
      if (!cooling || cooldown[i] == 0) eligible.push_back(i);
    }
    if (eligible.empty()) {
      cooldown = cooldown_update(cooldown, {}, cfg.strategy.rho);
      ++result.idle_ticks;
      continue;
    }
    double cheapest = std::numeric_limits<double>::infinity();
    for (const std::size_t i : eligible) {
      cheapest = std::min(cheapest, world.clients[i].front.cheapest().energy_j);
    }
    if (cheapest > remaining) {
      result.termination = "budget exhausted";
      break;
    }

    ++round;
    RoundContext ctx;
    ctx.round = round;
    ctx.remaining_budget_j = remaining;
    ctx.clients = views;
    if (cooling) ctx.cooldown = cooldown;

    const std::uint64_t work_before = strategy->work_units();
    const std::size_t evals_before = strategy->utility_evaluations();
    const auto t_select = Clock::now();
    const auto plan = strategy->plan(ctx);
    double overhead_ms = ms_since(t_select);
    if (!plan) {
      result.termination = "no feasible cohort";
      break;
    }

    // Audit the plan before any energy is spent.
    std::string problem;
    // ESCS may exceed gamma while it bootstraps untrained clients.
    const bool bootstrap =
        result.strategy == "escs" &&
        std::any_of(plan->cohort.begin(), plan->cohort.end(),
                    [&](std::size_t c) { return c < n && !trained[c]; });
    if (plan->cohort.size() > cfg.strategy.gamma && !bootstrap) {
      problem = fmt::format("cohort of {} exceeds gamma {}", plan->cohort.size(),
                            cfg.strategy.gamma);
    }
    for (const std::size_t c : plan->cohort) {
      if (c >= n) problem = fmt::format("unknown client {}", c);
      else if (cooling && cooldown[c] > 0) {
        problem = fmt::format("client {} is cooling down", c);
      }
    }
    if (plan->maxn_energy_j > remaining || plan->energy_j > remaining ||
        cum + plan->energy_j > cfg.budget_j) {
      problem = fmt::format(
          "round {} needs {:.3f} J (MAXN {:.3f} J) with {:.3f} J remaining",
          round, plan->energy_j, plan->maxn_energy_j, remaining);
    }
    if (plan->modes.size() != plan->cohort.size()) {
      problem = "every cohort member needs exactly one power mode";
    }
    if (!problem.empty()) {
      result.violation = problem;
      result.termination = "budget violation";
      break;
    }

    const std::size_t k = plan->cohort.size();
    std::vector<ModelParams> local(k);
    std::vector<std::size_t> counts(k);
    std::vector<double> losses(k);
    std::vector<double> accs(k);
    parallel_for(k, cfg.workers, [&](std::size_t j) {
      const std::size_t c = plan->cohort[j];
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.seed, kTrainStream, round, c);
      local[j] = local_train(spec, global, world.client_data[c], tc);
      const Evaluation ev = evaluate(spec, local[j], world.client_data[c]);
      losses[j] = ev.loss;
      accs[j] = ev.accuracy;
      counts[j] = world.client_data[c].size();
    });
    std::vector<ModelContribution> parts;
    for (std::size_t j = 0; j < k; ++j) parts.push_back({&local[j], counts[j]});
    ModelParams next = fedavg_aggregate(parts);

    const auto t_observe = Clock::now();
    RoundOutcome outcome;
    outcome.round = round;
    outcome.cohort = plan->cohort;
    outcome.local_models = local;
    outcome.sample_counts = counts;
    outcome.local_loss = losses;
    outcome.previous_global = &global;
    strategy->observe(outcome);
    const Evaluation global_eval = evaluate(spec, next, world.validation);
    overhead_ms += ms_since(t_observe);

    if (const ShapleyLedger* ledger = strategy->ledger()) {
      ledger->write_round_csv(ledger_rows);
    }
    if (cooling) {
      std::vector<std::pair<std::size_t, double>> selected;
      for (std::size_t j = 0; j < k; ++j) {
        selected.emplace_back(plan->cohort[j], accs[j] * cfg.accuracy_scale);
      }
      cooldown = cooldown_update(cooldown, selected, cfg.strategy.rho);
    }

    cum += plan->energy_j;
    for (const std::size_t c : plan->cohort) trained[c] = true;
    global = std::move(next);

    RoundRecord rec;
    rec.round = round;
    rec.cohort = plan->cohort;
    rec.modes = plan->modes;
    rec.predicted_time_s = plan->predicted_time_s;
    rec.round_time_s = plan->round_time_s;
    rec.maxn_energy_j = plan->maxn_energy_j;
    rec.energy_j = plan->energy_j;
    rec.cum_energy_j = cum;
    rec.global_acc = global_eval.accuracy;
    rec.global_loss = global_eval.loss;
    rec.selection_wall_ms = overhead_ms;
    const double ops =
        static_cast<double>(strategy->work_units() - work_before) + eval_ops;
    rec.selection_modeled_ms = ops * cfg.modeled_ns_per_op * 1e-6;
    rec.evaluations = strategy->utility_evaluations() - evals_before;
    result.records.push_back(std::move(rec));
  }
  if (result.termination.empty()) result.termination = "round limit";

  result.ledger_csv = ledger_rows.str();
  result.log = strategy->log();
  result.final_model = std::move(global);
  SummaryOptions so;
  so.budget_j = cfg.budget_j;
  so.target_energy_j = cfg.target_energy_j;
  so.target_accuracy = cfg.target_accuracy;
  so.initial_accuracy = result.initial_accuracy;
  so.source = cfg.time_source;
  result.summary = summarize(result.records, so);
  return result;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));
  }
  const auto open = [&](const char* name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path));
    return out;
  };
  {
    auto out = open("metrics.csv");
    write_metrics_csv(out, result.records, cfg.time_source);
  }
  {
    auto out = open("plan.csv");
    write_plan_csv(out, result.records);
  }
  {
    auto out = open("shapley.csv");
    out << "round,client,phi_raw,phi_norm,phi_surrogate\n" << result.ledger_csv;
  }
  {
    auto out = open("summary.json");
    out << summary_json(result.summary) << '\n';
  }
  {
    auto out = open("config.json");
    out << config_to_json(cfg) << '\n';
  }
  if (!result.log.empty() || result.violation) {
    auto out = open("events.log");
    out << "termination: " << result.termination << '\n';
    if (result.violation) out << "violation: " << *result.violation << '\n';
    for (const auto& line : result.log) out << line << '\n';
  }
}

}  // namespace ebfl
