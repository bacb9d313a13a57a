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

#include "ebfl/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ebfl/error.hpp"

extern char** environ;

namespace ebfl {
namespace {

using nlohmann::json;

json to_json_tree(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  json cluster = json::object();
  for (const auto& [name, count] : c.cluster) cluster[name] = count;
  j["cluster"] = cluster;
  j["workload"] = c.workload;
  j["profiles"] = {{"file", c.profiles.file},
                   {"modes", c.profiles.modes},
                   {"noise", c.profiles.noise},
                   {"time_scale", c.profiles.time_scale},
                   {"power_scale", c.profiles.power_scale}};
  j["dataset"] = {{"classes", c.dataset.classes},
                  {"dim", c.dataset.dim},
                  {"samples", c.dataset.samples},
                  {"separation", c.dataset.separation},
                  {"validation_fraction", c.dataset.validation_fraction}};
  j["partition"] = {{"kind", c.partition.kind},
                    {"alpha", c.partition.alpha},
                    {"labels_per_client", c.partition.labels_per_client}};
  j["model"] = {{"kind", to_string(c.model)}, {"hidden", c.hidden}};
  j["train"] = {{"local_epochs", c.train.local_epochs},
                {"batch_size", c.train.batch_size},
                {"learning_rate", c.train.learning_rate}};
  const auto& s = c.strategy;
  j["strategy"] = {{"name", s.name},
                   {"gamma", s.gamma},
                   {"alpha", s.alpha},
                   {"beta", s.beta},
                   {"rho", s.rho},
                   {"cooldown", s.cooldown ? json(*s.cooldown) : json(nullptr)},
                   {"exhaustive_cap", s.exhaustive_cap},
                   {"escs_loss_weight", s.escs_loss_weight},
                   {"escs_time_weight", s.escs_time_weight},
                   {"accuracy_scale", c.accuracy_scale}};
  j["coreset"] = {{"mode", c.coreset.mode},
                  {"ratio", c.coreset.ratio},
                  {"min_per_class", c.coreset.min_per_class}};
  j["budget_j"] = c.budget_j;
  j["target_energy_j"] =
      c.target_energy_j ? json(*c.target_energy_j) : json(nullptr);
  j["target_accuracy"] =
      c.target_accuracy ? json(*c.target_accuracy) : json(nullptr);
  j["workers"] = c.workers;
  j["max_rounds"] = c.max_rounds;
  j["metrics"] = {{"selection_time", to_string(c.time_source)},
                  {"modeled_ns_per_op", c.modeled_ns_per_op}};
  return j;
}

void merge(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) {
    throw ValidationError(fmt::format("'{}' must be an object", path));
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) {
      throw ValidationError(fmt::format("unknown config key '{}'", where));
    }
    json& slot = base[key];
    if (key == "cluster" && path.empty()) {
      slot = value;
    } else if (slot.is_object()) {
      merge(slot, value, where);
    } else {
      slot = value;
    }
  }
}

void apply_env(json& tree, const std::map<std::string, std::string>& env) {
  for (const auto& [name, raw] : env) {
    if (!name.starts_with(kEnvPrefix)) continue;
    std::string rest = name.substr(kEnvPrefix.size());
    std::transform(rest.begin(), rest.end(), rest.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = rest.find("__", pos);
      parts.push_back(rest.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    json* slot = &tree;
    for (const auto& p : parts) {
      if (!slot->is_object() || (!slot->contains(p) && slot != &tree["cluster"])) {
        throw ValidationError(
            fmt::format("environment override {} names no config key", name));
      }
      slot = &(*slot)[p];
    }
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    *slot = value;
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& section) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config key '{}{}': {}", section, key,
                                      e.what()));
  }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key,
                         const std::string& section) {
  if (j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, section);
}

ExperimentConfig from_tree(const json& j) {
  ExperimentConfig c;
  c.seed = get<std::uint64_t>(j, "seed", "");
  c.cluster.clear();
  if (!j.at("cluster").is_object()) {
    throw ValidationError("'cluster' must map device types to counts");
  }
  for (const auto& [name, count] : j.at("cluster").items()) {
    if (!count.is_number_unsigned() && !count.is_number_integer()) {
      throw ValidationError(fmt::format("cluster.{} must be a count", name));
    }
    if (count.get<long long>() < 0) {
      throw ValidationError(fmt::format("cluster.{} is negative", name));
    }
    c.cluster.emplace_back(name, count.get<std::size_t>());
  }
  c.workload = get<std::string>(j, "workload", "");

  const json& p = j.at("profiles");
  c.profiles.file = get<std::string>(p, "file", "profiles.");
  c.profiles.modes = get<int>(p, "modes", "profiles.");
  c.profiles.noise = get<bool>(p, "noise", "profiles.");
  c.profiles.time_scale = get<double>(p, "time_scale", "profiles.");
  c.profiles.power_scale = get<double>(p, "power_scale", "profiles.");

  const json& d = j.at("dataset");
  c.dataset.classes = get<int>(d, "classes", "dataset.");
  c.dataset.dim = get<std::size_t>(d, "dim", "dataset.");
  c.dataset.samples = get<std::size_t>(d, "samples", "dataset.");
  c.dataset.separation = get<double>(d, "separation", "dataset.");
  c.dataset.validation_fraction =
      get<double>(d, "validation_fraction", "dataset.");

  const json& pa = j.at("partition");
  c.partition.kind = get<std::string>(pa, "kind", "partition.");
  c.partition.alpha = get<double>(pa, "alpha", "partition.");
  c.partition.labels_per_client =
      get<std::size_t>(pa, "labels_per_client", "partition.");

  const json& m = j.at("model");
  c.model = parse_model_kind(get<std::string>(m, "kind", "model."));
  c.hidden = get<std::size_t>(m, "hidden", "model.");

  const json& t = j.at("train");
  c.train.local_epochs = get<int>(t, "local_epochs", "train.");
  c.train.batch_size = get<std::size_t>(t, "batch_size", "train.");
  c.train.learning_rate = get<double>(t, "learning_rate", "train.");

  const json& s = j.at("strategy");
  c.strategy.name = get<std::string>(s, "name", "strategy.");
  c.strategy.gamma = get<std::size_t>(s, "gamma", "strategy.");
  c.strategy.alpha = get<double>(s, "alpha", "strategy.");
  c.strategy.beta = get<double>(s, "beta", "strategy.");
  c.strategy.rho = get<double>(s, "rho", "strategy.");
  c.strategy.cooldown = get_opt<bool>(s, "cooldown", "strategy.");
  c.strategy.exhaustive_cap = get<std::size_t>(s, "exhaustive_cap", "strategy.");
  c.strategy.escs_loss_weight = get<double>(s, "escs_loss_weight", "strategy.");
  c.strategy.escs_time_weight = get<double>(s, "escs_time_weight", "strategy.");
  c.accuracy_scale = get<double>(s, "accuracy_scale", "strategy.");

  const json& cs = j.at("coreset");
  c.coreset.mode = get<std::string>(cs, "mode", "coreset.");
  c.coreset.ratio = get<double>(cs, "ratio", "coreset.");
  c.coreset.min_per_class = get<std::size_t>(cs, "min_per_class", "coreset.");

  c.budget_j = get<double>(j, "budget_j", "");
  c.target_energy_j = get_opt<double>(j, "target_energy_j", "");
  c.target_accuracy = get_opt<double>(j, "target_accuracy", "");
  c.workers = get<std::size_t>(j, "workers", "");
  c.max_rounds = get<std::size_t>(j, "max_rounds", "");

  const json& me = j.at("metrics");
  c.time_source =
      parse_time_source(get<std::string>(me, "selection_time", "metrics."));
  c.modeled_ns_per_op = get<double>(me, "modeled_ns_per_op", "metrics.");
  return c;
}

}  // namespace

bool CoresetConfig::enabled_for(const std::string& strategy) const {
  if (mode == "on") return true;
  if (mode == "off") return false;
  return strategy == "fedj_k";
}

std::size_t ExperimentConfig::client_count() const {
  std::size_t n = 0;
  for (const auto& [name, count] : cluster) n += count;
  return n;
}

void ExperimentConfig::validate() const {
  if (!(budget_j > 0.0)) throw ValidationError("budget_j must be positive");
  if (client_count() == 0) throw ValidationError("the cluster has no clients");
  strategy.validate();
  if (strategy.gamma > client_count()) {
    throw ValidationError(fmt::format("gamma {} exceeds the {} clients",
                                      strategy.gamma, client_count()));
  }
  if (partition.kind != "dirichlet" && partition.kind != "shard") {
    throw ValidationError(fmt::format(
        "partition.kind must be dirichlet|shard, got '{}'", partition.kind));
  }
  if (coreset.mode != "auto" && coreset.mode != "on" && coreset.mode != "off") {
    throw ValidationError("coreset.mode must be auto|on|off");
  }
  if (coreset.enabled_for(strategy.name) &&
      !(coreset.ratio > 0.0 && coreset.ratio < 1.0)) {
    throw ValidationError("coreset.ratio must lie in (0, 1)");
  }
  if (!(dataset.validation_fraction > 0.0 && dataset.validation_fraction < 1.0)) {
    throw ValidationError("dataset.validation_fraction must lie in (0, 1)");
  }
  if (!(accuracy_scale > 0.0)) {
    throw ValidationError("strategy.accuracy_scale must be positive");
  }
  if (!(profiles.time_scale > 0.0) || !(profiles.power_scale > 0.0)) {
    throw ValidationError("profile scales must be positive");
  }
  if (!(modeled_ns_per_op >= 0.0)) {
    throw ValidationError("metrics.modeled_ns_per_op must be non-negative");
  }
  if (workers == 0) throw ValidationError("workers must be >= 1");
  if (max_rounds == 0) throw ValidationError("max_rounds must be >= 1");
  train.validate();
}

ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& env) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("config is not valid JSON: {}", e.what()), 0);
  }
  json tree = to_json_tree(ExperimentConfig{});
  merge(tree, user, "");
  apply_env(tree, env);
  ExperimentConfig cfg = from_tree(tree);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, bool use_env) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(),
                      use_env ? environment_overrides()
                              : std::map<std::string, std::string>{});
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string_view entry(*e);
    if (!entry.starts_with(kEnvPrefix)) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(entry.substr(0, eq)),
                std::string(entry.substr(eq + 1)));
  }
  return out;
}

std::string config_to_json(const ExperimentConfig& config) {
  return to_json_tree(config).dump(2);
}

}  // namespace ebfl
