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

#ifndef EBFL_DEVICE_MODEL_HPP_
#define EBFL_DEVICE_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ebfl {

// One power mode's measured cost of a single local-training round.
struct PowerModeProfile {
  std::string mode_id;
  int cpu_cores = 0;
  double cpu_mhz = 0.0;
  double gpu_mhz = 0.0;
  double mem_mhz = 0.0;
  double round_time_s = 0.0;
  double avg_power_w = 0.0;
};

// Throws ValidationError unless round_time_s > 0 and avg_power_w > 0.
void validate_mode(const PowerModeProfile& mode);

// Joules for one round: avg_power_w * round_time_s.
double energy_of(const PowerModeProfile& mode);

struct DeviceWorkloadProfile {
  std::string device_type;
  std::string workload;
  std::vector<PowerModeProfile> modes;
  // Fastest mode; ties broken by lower energy, then smaller mode_id.
  std::string maxn_mode_id;

  const PowerModeProfile& maxn() const;
  const PowerModeProfile& mode(std::string_view mode_id) const;

  // Copy with every round time multiplied by `factor` (power unchanged).
  DeviceWorkloadProfile scaled(double factor) const;
};

// Validates the modes (non-empty, unique ids, positive time/power) and fills
// maxn_mode_id.
DeviceWorkloadProfile make_profile(std::string device_type,
                                   std::string workload,
                                   std::vector<PowerModeProfile> modes);

struct ParetoPoint {
  std::string mode_id;
  double round_time_s = 0.0;
  double energy_j = 0.0;
};

// Non-dominated (time, energy) modes, ascending time and strictly descending
// energy. points.front() is the MAXN mode.
struct ParetoFront {
  std::vector<ParetoPoint> points;

  const ParetoPoint& fastest() const { return points.front(); }
  const ParetoPoint& cheapest() const { return points.back(); }
};

ParetoFront extract_pareto(const DeviceWorkloadProfile& profile);

// Trace CSV with the header
//   device_type,workload,mode_id,cpu_cores,cpu_mhz,gpu_mhz,mem_mhz,
//   round_time_s,avg_power_w
// Profiles come back ordered by (device_type, workload).
std::vector<DeviceWorkloadProfile> load_profiles(std::istream& in);
std::vector<DeviceWorkloadProfile> load_profiles_file(const std::string& path);
void write_profiles(std::ostream& out,
                    const std::vector<DeviceWorkloadProfile>& profiles);

const DeviceWorkloadProfile& find_profile(
    const std::vector<DeviceWorkloadProfile>& profiles,
    std::string_view device_type, std::string_view workload);

// Synthetic stand-in for profiled devices. Each class spans a range of round
// times (MAXN is the low end) and power draws (MAXN is the high end).
struct DeviceClassSpec {
  std::string name;
  double time_min_s = 0.0;
  double time_max_s = 0.0;
  double power_min_w = 0.0;
  double power_max_w = 0.0;
  int mode_count = 0;
  int cpu_cores = 8;
  double cpu_mhz_max = 2200.0;
  double gpu_mhz_max = 1300.0;
  double mem_mhz_max = 3100.0;
};

struct WorkloadSpec {
  std::string name;
  double time_scale = 1.0;
  double power_scale = 1.0;
};

struct ProfileGeneratorConfig {
  std::vector<DeviceClassSpec> classes;
  std::vector<WorkloadSpec> workloads;
  // Multiplicative Gaussian perturbation emulating predictor error.
  bool noise = false;
  double time_noise = 0.09;
  double power_noise = 0.07;
};

std::vector<DeviceWorkloadProfile> synthesize_profiles(
    const ProfileGeneratorConfig& config, std::uint64_t seed);

// Applies the noise model of `config` to existing profiles.
std::vector<DeviceWorkloadProfile> perturb_profiles(
    const std::vector<DeviceWorkloadProfile>& profiles, double time_noise,
    double power_noise, std::uint64_t seed);

// Four classes shaped after Orin AGX, AGX Xavier, Xavier NX and Orin Nano.
std::vector<DeviceClassSpec> default_device_classes(int mode_count);

}  // namespace ebfl

#endif  // EBFL_DEVICE_MODEL_HPP_
