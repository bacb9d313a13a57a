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

#include "ebfl/device_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "ebfl/csv.hpp"
#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {
namespace {

constexpr std::array<std::string_view, 9> kProfileColumns = {
    "device_type", "workload", "mode_id",      "cpu_cores",  "cpu_mhz",
    "gpu_mhz",     "mem_mhz",  "round_time_s", "avg_power_w"};

// Canonical order: time, then energy, then id.
bool faster_then_cheaper(const PowerModeProfile& a, const PowerModeProfile& b) {
  const double ea = energy_of(a);
  const double eb = energy_of(b);
  return std::tie(a.round_time_s, ea, a.mode_id) <
         std::tie(b.round_time_s, eb, b.mode_id);
}

std::string mode_name(int index, int count) {
  return count > 1000 ? fmt::format("pm{:05d}", index)
                      : fmt::format("pm{:03d}", index);
}

}  // namespace

void validate_mode(const PowerModeProfile& mode) {
  if (!(mode.round_time_s > 0.0) || !std::isfinite(mode.round_time_s)) {
    throw ValidationError("mode '" + mode.mode_id +
                          "': round_time_s must be positive");
  }
  if (!(mode.avg_power_w > 0.0) || !std::isfinite(mode.avg_power_w)) {
    throw ValidationError("mode '" + mode.mode_id +
                          "': avg_power_w must be positive");
  }
}

double energy_of(const PowerModeProfile& mode) {
  validate_mode(mode);
  return mode.avg_power_w * mode.round_time_s;
}

const PowerModeProfile& DeviceWorkloadProfile::maxn() const {
  return mode(maxn_mode_id);
}

const PowerModeProfile& DeviceWorkloadProfile::mode(
    std::string_view mode_id) const {
  for (const auto& m : modes) {
    if (m.mode_id == mode_id) return m;
  }
  throw ValidationError(fmt::format("{}/{}: unknown mode '{}'", device_type,
                                    workload, mode_id));
}

DeviceWorkloadProfile DeviceWorkloadProfile::scaled(double factor) const {
  if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
  DeviceWorkloadProfile out = *this;
  for (auto& m : out.modes) m.round_time_s *= factor;
  return out;
}

DeviceWorkloadProfile make_profile(std::string device_type,
                                   std::string workload,
                                   std::vector<PowerModeProfile> modes) {
  if (modes.empty()) {
    throw ValidationError(fmt::format("{}/{}: empty mode set", device_type,
                                      workload));
  }
  std::set<std::string_view> ids;
  for (const auto& m : modes) {
    validate_mode(m);
    if (!ids.insert(m.mode_id).second) {
      throw DuplicateKeyError(fmt::format("{}/{}: duplicate mode '{}'",
                                          device_type, workload, m.mode_id));
    }
  }
  const auto fastest =
      std::min_element(modes.begin(), modes.end(), faster_then_cheaper);
  DeviceWorkloadProfile profile;
  profile.maxn_mode_id = fastest->mode_id;
  profile.device_type = std::move(device_type);
  profile.workload = std::move(workload);
  profile.modes = std::move(modes);
  return profile;
}

ParetoFront extract_pareto(const DeviceWorkloadProfile& profile) {
  if (profile.modes.empty()) {
    throw ValidationError("extract_pareto: empty mode set");
  }
  std::vector<const PowerModeProfile*> order;
  order.reserve(profile.modes.size());
  for (const auto& m : profile.modes) order.push_back(&m);
  std::sort(order.begin(), order.end(),
            [](const PowerModeProfile* a, const PowerModeProfile* b) {
              return faster_then_cheaper(*a, *b);
            });

  // Sweep in time order; a mode survives iff it is strictly cheaper than
  // everything faster or equally fast.
  ParetoFront front;
  double best_energy = std::numeric_limits<double>::infinity();
  for (const PowerModeProfile* m : order) {
    const double e = energy_of(*m);
    if (e < best_energy) {
      front.points.push_back({m->mode_id, m->round_time_s, e});
      best_energy = e;
    }
  }
  return front;
}

std::vector<DeviceWorkloadProfile> load_profiles(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;

  const auto header = csv::split(line);
  std::array<int, kProfileColumns.size()> column_of{};
  column_of.fill(-1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto it =
        std::find(kProfileColumns.begin(), kProfileColumns.end(), header[c]);
    if (it == kProfileColumns.end()) {
      throw ParseError("unknown column '" + std::string(header[c]) + "'",
                       line_no);
    }
    const auto k = static_cast<std::size_t>(it - kProfileColumns.begin());
    if (column_of[k] != -1) {
      throw ParseError("repeated column '" + std::string(header[c]) + "'",
                       line_no);
    }
    column_of[k] = static_cast<int>(c);
  }
  for (std::size_t k = 0; k < kProfileColumns.size(); ++k) {
    if (column_of[k] == -1) {
      throw ParseError("missing column '" + std::string(kProfileColumns[k]) +
                           "'",
                       line_no);
    }
  }

  std::map<std::pair<std::string, std::string>, std::vector<PowerModeProfile>>
      grouped;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t>
      seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("expected {} fields, got {}", header.size(),
                                   fields.size()),
                       line_no);
    }
    auto field = [&](std::size_t k) { return fields[column_of[k]]; };
    PowerModeProfile mode;
    const std::string device(field(0));
    const std::string workload(field(1));
    mode.mode_id = std::string(field(2));
    if (device.empty() || workload.empty() || mode.mode_id.empty()) {
      throw ParseError("empty identifier", line_no);
    }
    mode.cpu_cores =
        static_cast<int>(csv::parse_int(field(3), line_no, kProfileColumns[3]));
    mode.cpu_mhz = csv::parse_double(field(4), line_no, kProfileColumns[4]);
    mode.gpu_mhz = csv::parse_double(field(5), line_no, kProfileColumns[5]);
    mode.mem_mhz = csv::parse_double(field(6), line_no, kProfileColumns[6]);
    mode.round_time_s =
        csv::parse_double(field(7), line_no, kProfileColumns[7]);
    mode.avg_power_w = csv::parse_double(field(8), line_no, kProfileColumns[8]);
    try {
      validate_mode(mode);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
    }
    const auto [it, inserted] =
        seen.emplace(std::make_tuple(device, workload, mode.mode_id), line_no);
    if (!inserted) {
      throw DuplicateKeyError(fmt::format(
          "line {}: duplicate ({}, {}, {}) first seen on line {}", line_no,
          device, workload, mode.mode_id, it->second));
    }
    grouped[{device, workload}].push_back(std::move(mode));
  }
  if (grouped.empty()) throw ValidationError("trace contains no modes");

  std::vector<DeviceWorkloadProfile> profiles;
  profiles.reserve(grouped.size());
  for (auto& [key, modes] : grouped) {
    profiles.push_back(make_profile(key.first, key.second, std::move(modes)));
  }
  return profiles;
}

std::vector<DeviceWorkloadProfile> load_profiles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile trace '" + path + "'");
  return load_profiles(in);
}

void write_profiles(std::ostream& out,
                    const std::vector<DeviceWorkloadProfile>& profiles) {
  for (std::size_t k = 0; k < kProfileColumns.size(); ++k) {
    out << (k ? "," : "") << kProfileColumns[k];
  }
  out << '\n';
  for (const auto& p : profiles) {
    for (const auto& m : p.modes) {
      out << fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                         p.device_type, p.workload, m.mode_id, m.cpu_cores,
                         m.cpu_mhz, m.gpu_mhz, m.mem_mhz, m.round_time_s,
                         m.avg_power_w);
    }
  }
}

const DeviceWorkloadProfile& find_profile(
    const std::vector<DeviceWorkloadProfile>& profiles,
    std::string_view device_type, std::string_view workload) {
  for (const auto& p : profiles) {
    if (p.device_type == device_type && p.workload == workload) return p;
  }
  throw ValidationError(fmt::format("no profile for device '{}' workload '{}'",
                                    device_type, workload));
}

std::vector<DeviceWorkloadProfile> synthesize_profiles(
    const ProfileGeneratorConfig& config, std::uint64_t seed) {
  if (config.classes.empty() || config.workloads.empty()) {
    throw ValidationError("generator needs at least one class and workload");
  }
  std::vector<DeviceWorkloadProfile> profiles;
  for (std::size_t c = 0; c < config.classes.size(); ++c) {
    const DeviceClassSpec& cls = config.classes[c];
    if (cls.mode_count <= 0) {
      throw ValidationError("class '" + cls.name + "': mode_count must be > 0");
    }
    if (!(cls.time_min_s > 0.0) || !(cls.time_max_s >= cls.time_min_s) ||
        !(cls.power_min_w > 0.0) || !(cls.power_max_w >= cls.power_min_w) ||
        cls.cpu_cores <= 0) {
      throw ValidationError("class '" + cls.name +
                            "': ranges must be positive and ordered");
    }
    for (std::size_t w = 0; w < config.workloads.size(); ++w) {
      const WorkloadSpec& wl = config.workloads[w];
      if (!(wl.time_scale > 0.0) || !(wl.power_scale > 0.0)) {
        throw ValidationError("workload '" + wl.name +
                              "': scales must be positive");
      }
      Rng rng(derive_seed(seed, kProfileStream, c, w));
      std::uniform_real_distribution<double> frac(0.1, 1.0);
      std::uniform_int_distribution<int> cores(1, cls.cpu_cores);
      std::normal_distribution<double> jitter(0.0, 0.04);

      std::vector<PowerModeProfile> modes;
      modes.reserve(cls.mode_count);
      for (int k = 0; k < cls.mode_count; ++k) {
        // Mode 0 is the all-maximum configuration.
        const double f_cpu = k == 0 ? 1.0 : frac(rng);
        const double f_gpu = k == 0 ? 1.0 : frac(rng);
        const double f_mem = k == 0 ? 1.0 : frac(rng);
        const int n_cores = k == 0 ? cls.cpu_cores : cores(rng);
        const double core_frac = static_cast<double>(n_cores) / cls.cpu_cores;
        const double jt = k == 0 ? 0.0 : jitter(rng);
        const double jp = k == 0 ? 0.0 : jitter(rng);

        // Time follows speed^-kappa so the slowest modes reach time_max; power
        // is static plus a dynamic part that falls off faster than linearly
        // with frequency, giving a U-shaped energy curve.
        const double speed = std::max(
            0.1, 0.55 * f_gpu + 0.2 * f_cpu * std::sqrt(core_frac) + 0.25 * f_mem);
        const double kappa = std::log(cls.time_max_s / cls.time_min_s) / std::log(10.0);
        const double load = 0.6 * std::pow(f_gpu, 3.0) +
                            0.25 * f_cpu * f_cpu * core_frac +
                            0.15 * f_mem * f_mem;

        PowerModeProfile m;
        m.mode_id = mode_name(k, cls.mode_count);
        m.cpu_cores = n_cores;
        m.cpu_mhz = std::round(f_cpu * cls.cpu_mhz_max);
        m.gpu_mhz = std::round(f_gpu * cls.gpu_mhz_max);
        m.mem_mhz = std::round(f_mem * cls.mem_mhz_max);
        m.round_time_s = wl.time_scale * cls.time_min_s *
                         std::pow(speed, -kappa) * std::exp(std::abs(jt));
        m.avg_power_w =
            wl.power_scale *
            (cls.power_min_w + (cls.power_max_w - cls.power_min_w) * load) *
            std::exp(jp);
        modes.push_back(std::move(m));
      }
      profiles.push_back(make_profile(cls.name, wl.name, std::move(modes)));
    }
  }
  if (config.noise) {
    profiles = perturb_profiles(profiles, config.time_noise,
                                config.power_noise,
                                derive_seed(seed, kProfileNoiseStream));
  }
  std::sort(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) {
    return std::tie(a.device_type, a.workload) <
           std::tie(b.device_type, b.workload);
  });
  return profiles;
}

std::vector<DeviceWorkloadProfile> perturb_profiles(
    const std::vector<DeviceWorkloadProfile>& profiles, double time_noise,
    double power_noise, std::uint64_t seed) {
  if (time_noise < 0.0 || power_noise < 0.0) {
    throw ValidationError("noise magnitudes must be non-negative");
  }
  std::vector<DeviceWorkloadProfile> out;
  out.reserve(profiles.size());
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    Rng rng(derive_seed(seed, p));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<PowerModeProfile> modes = profiles[p].modes;
    for (auto& m : modes) {
      // Floor keeps values positive for extreme draws.
      m.round_time_s *= std::max(0.2, 1.0 + time_noise * normal(rng));
      m.avg_power_w *= std::max(0.2, 1.0 + power_noise * normal(rng));
    }
    out.push_back(make_profile(profiles[p].device_type, profiles[p].workload,
                               std::move(modes)));
  }
  return out;
}

std::vector<DeviceClassSpec> default_device_classes(int mode_count) {
  // name, time range (s), power range (W), count, cores, cpu/gpu/mem MHz.
  return {
      {"orin_agx", 20.0, 120.0, 15.0, 55.0, mode_count, 12, 2200, 1300, 3100},
      {"agx_xavier", 35.0, 200.0, 12.0, 40.0, mode_count, 8, 2200, 1300, 2100},
      {"xavier_nx", 60.0, 330.0, 7.0, 20.0, mode_count, 6, 1900, 1100, 1800},
      {"orin_nano", 50.0, 280.0, 5.0, 15.0, mode_count, 6, 1500, 620, 2100},
  };
}

}  // namespace ebfl
