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

// Command-line front end: run, sweep, plot, bench, gen-profiles, gen-data.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ebfl/bench.hpp"
#include "ebfl/config.hpp"
#include "ebfl/data_partition.hpp"
#include "ebfl/dataset.hpp"
#include "ebfl/device_model.hpp"
#include "ebfl/error.hpp"
#include "ebfl/orchestrator.hpp"
#include "ebfl/plot.hpp"
#include "ebfl/random.hpp"

namespace fs = std::filesystem;

namespace {

void print_summary(const ebfl::ExperimentResult& r) {
  const auto& s = r.summary;
  std::cout << fmt::format(
      "{}: {} rounds, {:.1f} J used of {:.1f} J, accuracy@target {:.4f}, "
      "final {:.4f} ({})\n",
      r.strategy, s.rounds, s.total_energy_j, s.budget_j,
      s.accuracy_at_target_energy, s.final_accuracy, r.termination);
  if (r.violation) std::cout << "  violation: " << *r.violation << '\n';
}

std::ofstream open_out(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path);
  if (!out) throw ebfl::IoError(fmt::format("cannot write '{}'", path));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-budgeted federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--out", out_dir, "Output directory");

  std::string configs_dir;
  std::string sweep_base;
  std::vector<std::string> sweep_strategies{"rnd",  "exsh",    "ksh",
                                            "escs", "fedj_ex", "fedj_k"};
  std::string sweep_out;
  auto* sweep = app.add_subcommand(
      "sweep", "Run every config in a directory, or one config per strategy");
  auto* configs_opt =
      sweep->add_option("--configs", configs_dir, "Directory of JSON configs");
  auto* base_opt = sweep->add_option("--config", sweep_base, "Base JSON config");
  sweep->add_option("--strategies", sweep_strategies, "Strategies for --config")
      ->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output root");
  configs_opt->excludes(base_opt);

  std::vector<std::string> metrics_files;
  std::string svg_out = "plot.svg";
  auto* plot = app.add_subcommand("plot", "Render metrics CSVs as SVG");
  plot->add_option("--metrics", metrics_files, "metrics.csv files")->required();
  plot->add_option("--out", svg_out, "SVG path");

  ebfl::BenchConfig bench_cfg;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time cohort selection");
  bench->add_option("--pools", bench_cfg.pools, "Pool sizes")->delimiter(',');
  bench->add_option("--cohorts", bench_cfg.cohorts, "Cohort sizes")
      ->delimiter(',');
  bench->add_option("--reps", bench_cfg.reps, "Repetitions per cell");
  bench->add_option("--timeout", bench_cfg.timeout_s, "Per-cell timeout (s)");
  bench->add_option("--seed", bench_cfg.seed, "Seed");
  bench->add_option("--budget-clients", bench_cfg.budget_clients,
                    "Budget in mean MAXN energies per cohort slot");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  int modes = 90;
  std::string workload = "synth";
  bool noise = false;
  std::uint64_t seed = 1;
  std::string profiles_out = "profiles.csv";
  auto* gen_profiles =
      app.add_subcommand("gen-profiles", "Write synthetic power-mode traces");
  gen_profiles->add_option("--modes", modes, "Modes per device class");
  gen_profiles->add_option("--workload", workload, "Workload name");
  gen_profiles->add_flag("--noise", noise, "Apply predictor noise");
  gen_profiles->add_option("--seed", seed, "Seed");
  gen_profiles->add_option("--out", profiles_out, "CSV path");

  std::string data_config;
  std::string data_out = "data";
  auto* gen_data = app.add_subcommand(
      "gen-data", "Write the dataset split and client partition of a config");
  gen_data->add_option("--config", data_config, "JSON config")->required();
  gen_data->add_option("--out", data_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = ebfl::load_config_file(config_path);
      const auto result = ebfl::run_experiment(cfg);
      ebfl::write_outputs(cfg, result, out_dir);
      print_summary(result);
      return result.violation ? 2 : 0;
    }
    if (*sweep) {
      std::vector<std::pair<std::string, ebfl::ExperimentConfig>> runs;
      if (!configs_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(configs_dir)) {
          if (e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
          runs.emplace_back(f.stem().string(),
                            ebfl::load_config_file(f.string()));
        }
        if (sweep_out.empty()) sweep_out = (fs::path(configs_dir) / "out").string();
      } else if (!sweep_base.empty()) {
        const auto base = ebfl::load_config_file(sweep_base);
        for (const auto& s : sweep_strategies) {
          auto cfg = base;
          cfg.strategy.name = s;
          cfg.validate();
          runs.emplace_back(s, cfg);
        }
        if (sweep_out.empty()) sweep_out = "sweep";
      } else {
        throw ebfl::ValidationError("sweep needs --configs or --config");
      }
      int status = 0;
      for (const auto& [name, cfg] : runs) {
        const auto result = ebfl::run_experiment(cfg);
        ebfl::write_outputs(cfg, result, (fs::path(sweep_out) / name).string());
        print_summary(result);
        if (result.violation) status = 2;
      }
      return status;
    }
    if (*plot) {
      ebfl::emit_plot(metrics_files, svg_out);
      std::cout << "wrote " << svg_out << '\n';
      return 0;
    }
    if (*bench) {
      const auto cells = ebfl::bench_selection(bench_cfg);
      if (bench_out.empty()) {
        ebfl::write_bench_csv(std::cout, cells);
      } else {
        auto out = open_out(bench_out);
        ebfl::write_bench_csv(out, cells);
      }
      return 0;
    }
    if (*gen_profiles) {
      ebfl::ProfileGeneratorConfig gen;
      gen.classes = ebfl::default_device_classes(modes);
      gen.workloads.push_back({workload, 1.0, 1.0});
      gen.noise = noise;
      const auto profiles = ebfl::synthesize_profiles(
          gen, ebfl::derive_seed(seed, ebfl::kProfileStream));
      auto out = open_out(profiles_out);
      ebfl::write_profiles(out, profiles);
      std::cout << fmt::format("wrote {} profiles to {}\n", profiles.size(),
                               profiles_out);
      return 0;
    }
    if (*gen_data) {
      const auto cfg = ebfl::load_config_file(data_config);
      const auto world = ebfl::build_world(cfg);
      fs::create_directories(data_out);
      {
        auto out = open_out((fs::path(data_out) / "train.csv").string());
        ebfl::write_dataset_csv(out, world.train);
      }
      {
        auto out = open_out((fs::path(data_out) / "validation.csv").string());
        ebfl::write_dataset_csv(out, world.validation);
      }
      {
        auto out = open_out((fs::path(data_out) / "partition.csv").string());
        ebfl::write_partition_csv(out, world.partition);
      }
      std::cout << fmt::format(
          "{} train / {} validation samples over {} clients; JSD {:.4f} "
          "(normalized), {:.4f} nats to pooled\n",
          world.train.size(), world.validation.size(), world.clients.size(),
          ebfl::js_divergence(world.partition),
          ebfl::js_divergence_to_pooled(world.partition));
      return 0;
    }
  } catch (const ebfl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
