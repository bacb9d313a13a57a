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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ebfl/device_model.hpp"
#include "ebfl/error.hpp"
#include "oracles.hpp"

namespace ebfl {
namespace {

constexpr const char* kHeader =
    "device_type,workload,mode_id,cpu_cores,cpu_mhz,gpu_mhz,mem_mhz,"
    "round_time_s,avg_power_w\n";

PowerModeProfile mode(std::string id, double t, double p) {
  PowerModeProfile m;
  m.mode_id = std::move(id);
  m.cpu_cores = 4;
  m.cpu_mhz = 1000;
  m.gpu_mhz = 800;
  m.mem_mhz = 2000;
  m.round_time_s = t;
  m.avg_power_w = p;
  return m;
}

DeviceWorkloadProfile random_profile(std::mt19937_64& rng, std::size_t modes) {
  std::uniform_real_distribution<double> t(1.0, 100.0);
  std::uniform_real_distribution<double> p(1.0, 60.0);
  std::vector<PowerModeProfile> ms;
  for (std::size_t k = 0; k < modes; ++k) {
    ms.push_back(mode("m" + std::to_string(k), t(rng), p(rng)));
  }
  return make_profile("dev", "wl", std::move(ms));
}

TEST(LoadProfiles, ThreeRowsPickMinTimeAsMaxn) {
  std::istringstream in(std::string(kHeader) +
                        "orin,lstm,a,8,1,1,1,12,10\n"
                        "orin,lstm,b,8,1,1,1,10,30\n"
                        "orin,lstm,c,8,1,1,1,15,5\n");
  const auto profiles = load_profiles(in);
  ASSERT_EQ(profiles.size(), 1u);
  EXPECT_EQ(profiles[0].modes.size(), 3u);
  EXPECT_EQ(profiles[0].maxn_mode_id, "b");
  EXPECT_DOUBLE_EQ(profiles[0].maxn().round_time_s, 10.0);
}

TEST(LoadProfiles, DuplicateRowIsDuplicateKeyError) {
  std::istringstream in(std::string(kHeader) +
                        "orin,lstm,a,8,1,1,1,12,10\n"
                        "orin,lstm,a,8,1,1,1,12,10\n");
  EXPECT_THROW(load_profiles(in), DuplicateKeyError);
}

TEST(LoadProfiles, MalformedRowNamesLine) {
  std::istringstream in(std::string(kHeader) +
                        "orin,lstm,a,8,1,1,1,12,10\n"
                        "orin,lstm,b,8,1,1,1,abc,10\n");
  try {
    load_profiles(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadProfiles, ShortRowAndUnknownColumn) {
  std::istringstream short_row(std::string(kHeader) + "orin,lstm,a,8,1,1\n");
  EXPECT_THROW(load_profiles(short_row), ParseError);
  std::istringstream bad_header("device_type,workload,bogus\n");
  EXPECT_THROW(load_profiles(bad_header), ParseError);
}

TEST(LoadProfiles, HeaderOnlyIsValidationError) {
  std::istringstream in(kHeader);
  EXPECT_THROW(load_profiles(in), ValidationError);
}

TEST(LoadProfiles, NonPositiveTimeRejected) {
  std::istringstream in(std::string(kHeader) + "orin,lstm,a,8,1,1,1,0,10\n");
  EXPECT_THROW(load_profiles(in), ValidationError);
}

TEST(LoadProfiles, RoundTripThroughWriter) {
  ProfileGeneratorConfig cfg;
  cfg.classes = default_device_classes(20);
  cfg.workloads = {{"a", 1.0, 1.0}, {"b", 2.0, 0.8}};
  const auto profiles = synthesize_profiles(cfg, 3);
  std::stringstream buf;
  write_profiles(buf, profiles);
  const auto back = load_profiles(buf);
  ASSERT_EQ(back.size(), profiles.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].device_type, profiles[i].device_type);
    EXPECT_EQ(back[i].maxn_mode_id, profiles[i].maxn_mode_id);
    ASSERT_EQ(back[i].modes.size(), profiles[i].modes.size());
    EXPECT_DOUBLE_EQ(back[i].modes[5].round_time_s,
                     profiles[i].modes[5].round_time_s);
  }
}

TEST(EnergyOf, PowerTimesTime) {
  EXPECT_DOUBLE_EQ(energy_of(mode("x", 12.5, 4.0)), 50.0);
  EXPECT_THROW(energy_of(mode("x", -1.0, 4.0)), ValidationError);
}

TEST(MakeProfile, EmptyAndDuplicateModes) {
  EXPECT_THROW(make_profile("d", "w", {}), ValidationError);
  EXPECT_THROW(make_profile("d", "w", {mode("a", 1, 1), mode("a", 2, 1)}),
               DuplicateKeyError);
}

TEST(MakeProfile, MaxnTieBrokenByEnergy) {
  const auto p = make_profile("d", "w", {mode("a", 10, 30), mode("b", 10, 20)});
  EXPECT_EQ(p.maxn_mode_id, "b");
}

TEST(Synthesize, NinetyModesPerWorkload) {
  ProfileGeneratorConfig cfg;
  cfg.classes = default_device_classes(90);
  cfg.workloads = {{"resnet", 1.0, 1.0}};
  const auto profiles = synthesize_profiles(cfg, 11);
  ASSERT_EQ(profiles.size(), 4u);
  for (const auto& p : profiles) {
    EXPECT_EQ(p.modes.size(), 90u);
    EXPECT_EQ(p.maxn_mode_id, "pm000");
  }
}

TEST(Synthesize, FrontsOfferEnergySavings) {
  ProfileGeneratorConfig cfg;
  cfg.classes = default_device_classes(90);
  cfg.workloads = {{"w", 1.0, 1.0}};
  for (const auto& p : synthesize_profiles(cfg, 5)) {
    const auto front = extract_pareto(p);
    EXPECT_GE(front.points.size(), 3u) << p.device_type;
    EXPECT_LT(front.cheapest().energy_j, 0.9 * front.fastest().energy_j);
  }
}

TEST(Synthesize, NoiseIsSeparateStream) {
  ProfileGeneratorConfig cfg;
  cfg.classes = default_device_classes(10);
  cfg.workloads = {{"w", 1.0, 1.0}};
  const auto base = synthesize_profiles(cfg, 9);
  cfg.noise = true;
  const auto noisy = synthesize_profiles(cfg, 9);
  cfg.noise = false;
  const auto again = synthesize_profiles(cfg, 9);
  EXPECT_EQ(base[0].modes[3].round_time_s, again[0].modes[3].round_time_s);
  EXPECT_NE(base[0].modes[3].round_time_s, noisy[0].modes[3].round_time_s);
}

TEST(Scaled, MultipliesTimesOnly) {
  const auto p = make_profile("d", "w", {mode("a", 10, 30), mode("b", 20, 10)});
  const auto s = p.scaled(0.5);
  EXPECT_DOUBLE_EQ(s.mode("a").round_time_s, 5.0);
  EXPECT_DOUBLE_EQ(s.mode("a").avg_power_w, 30.0);
  EXPECT_EQ(s.maxn_mode_id, "a");
}

TEST(Pareto, KnownFront) {
  const auto p = make_profile(
      "d", "w",
      {mode("fast", 6, 20), mode("mid", 9, 10), mode("slow", 12, 5),
       mode("bad", 10, 12), mode("worse", 13, 6)});
  const auto f = extract_pareto(p);
  ASSERT_EQ(f.points.size(), 3u);
  EXPECT_EQ(f.points[0].mode_id, "fast");
  EXPECT_EQ(f.points[1].mode_id, "mid");
  EXPECT_EQ(f.points[2].mode_id, "slow");
  EXPECT_EQ(f.fastest().mode_id, p.maxn_mode_id);
}

TEST(Pareto, MatchesBruteForceOnRandomProfiles) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> size(1, 300);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_profile(rng, size(rng));
    const auto f = extract_pareto(p);
    const auto want = oracle::brute_pareto(p);
    ASSERT_EQ(f.points.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_EQ(f.points[k].mode_id, want[k].id);
    }
    EXPECT_EQ(f.fastest().mode_id, p.maxn_mode_id);
    for (std::size_t k = 1; k < f.points.size(); ++k) {
      EXPECT_GT(f.points[k].round_time_s, f.points[k - 1].round_time_s);
      EXPECT_LT(f.points[k].energy_j, f.points[k - 1].energy_j);
    }
  }
}

}  // namespace
}  // namespace ebfl
