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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ebfl/error.hpp"
#include "ebfl/metrics.hpp"
#include "ebfl/plot.hpp"

namespace ebfl {
namespace {

std::vector<RoundRecord> records_with_energy(std::initializer_list<double> e) {
  std::vector<RoundRecord> out;
  double cum = 0.0;
  std::size_t r = 0;
  for (double x : e) {
    RoundRecord rec;
    rec.round = ++r;
    rec.cohort = {r - 1, r};
    rec.round_time_s = 10.0 * static_cast<double>(r);
    rec.energy_j = x;
    cum += x;
    rec.cum_energy_j = cum;
    rec.global_acc = 0.2 * static_cast<double>(r);
    rec.selection_wall_ms = 3.0;
    rec.selection_modeled_ms = 1000.0;
    out.push_back(rec);
  }
  return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos;
       p = hay.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

TEST(MetricsCsv, EmptyIsHeaderOnly) {
  std::ostringstream out;
  write_metrics_csv(out, {}, TimeSource::kModeled);
  EXPECT_EQ(out.str(), std::string(kMetricsHeader) + "\n");
  const auto s = summarize({}, {100.0});
  const auto j = nlohmann::json::parse(summary_json(s));
  EXPECT_EQ(j["status"], "no rounds");
  EXPECT_EQ(j["rounds"], 0);
}

TEST(MetricsCsv, RoundTrip) {
  const auto recs = records_with_energy({3, 4, 5});
  std::stringstream buf;
  write_metrics_csv(buf, recs, TimeSource::kWall);
  const auto rows = read_metrics_csv(buf);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].cohort, (std::vector<std::size_t>{1, 2}));
  EXPECT_DOUBLE_EQ(rows[2].cum_energy_j, 12.0);
  EXPECT_DOUBLE_EQ(rows[0].selection_ms, 3.0);
}

TEST(MetricsCsv, MalformedRowNamesLine) {
  std::istringstream bad(std::string(kMetricsHeader) +
                         "\n1,0 1,2.0,3.0,3.0,0.5,1.0\n2,0,x,3,6,0.5,1\n");
  try {
    read_metrics_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream header("round,cohort\n");
  EXPECT_THROW(read_metrics_csv(header), ParseError);
}

TEST(Summary, OverBudgetFlagged) {
  const auto s = summarize(records_with_energy({3, 4, 5}), {10.0});
  EXPECT_DOUBLE_EQ(s.total_energy_j, 12.0);
  EXPECT_TRUE(s.budget_violation);
  EXPECT_TRUE(s.energy_monotone);
}

TEST(Summary, NonIncreasingEnergyFlagged) {
  EXPECT_FALSE(summarize(records_with_energy({3, 0, 5}), {100.0}).energy_monotone);
}

TEST(Summary, AccuracyAtTargetAndTta) {
  SummaryOptions opts{100.0};
  opts.target_energy_j = 7.0;
  opts.target_accuracy = 0.4;
  opts.initial_accuracy = 0.1;
  const auto s = summarize(records_with_energy({3, 4, 5}), opts);
  EXPECT_DOUBLE_EQ(s.accuracy_at_target_energy, 0.4);
  EXPECT_NEAR(s.final_accuracy, 0.6, 1e-12);
  ASSERT_TRUE(s.tta_round);
  EXPECT_EQ(*s.tta_round, 2u);
  // Two rounds of 10 s and 20 s plus 1 s modeled overhead each.
  EXPECT_DOUBLE_EQ(*s.tta_s, 32.0);
}

TEST(Summary, UnreachedTarget) {
  SummaryOptions opts{100.0};
  opts.target_accuracy = 0.99;
  const auto s = summarize(records_with_energy({3, 4}), opts);
  EXPECT_FALSE(s.tta_s);
  const auto j = nlohmann::json::parse(summary_json(s));
  EXPECT_EQ(j["tta_s"], "unreached");
  EXPECT_EQ(j["status"], "ok");
}

TEST(PlanCsv, RowPerAssignment) {
  auto recs = records_with_energy({3});
  recs[0].modes = {{0, "pm001", 4.5, 1.25, 2.0}, {1, "pm000", 3.0, 1.75, 1.75}};
  std::ostringstream out;
  write_plan_csv(out, recs);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "round,client,mode_id,tau_s,energy_j,maxn_energy_j");
  EXPECT_EQ(count(text, "\n"), 3u);
  EXPECT_NE(text.find("1,0,pm001,"), std::string::npos);
}

TEST(TimeSourceNames, RoundTrip) {
  EXPECT_EQ(parse_time_source("wall"), TimeSource::kWall);
  EXPECT_EQ(to_string(TimeSource::kModeled), "modeled");
  EXPECT_THROW(parse_time_source("cpu"), ValidationError);
}

class PlotTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("ebfl_plot_" + std::to_string(::testing::UnitTest::GetInstance()
                                              ->random_seed()) +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write_run(const std::string& name,
                        const std::vector<RoundRecord>& recs) {
    const auto d = dir_ / name;
    std::filesystem::create_directories(d);
    std::ofstream out(d / "metrics.csv");
    write_metrics_csv(out, recs, TimeSource::kModeled);
    return (d / "metrics.csv").string();
  }

  std::filesystem::path dir_;
};

TEST_F(PlotTest, SingleSeries) {
  const auto path = write_run("fedj_k", records_with_energy({3, 4}));
  const auto series = load_series(path);
  EXPECT_EQ(series.label, "fedj_k");
  const auto svg = render_svg(std::span(&series, 1));
  EXPECT_EQ(count(svg, "class=\"accuracy\""), 1u);
  EXPECT_EQ(count(svg, "class=\"time\""), 1u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST_F(PlotTest, SixSeriesLabeled) {
  std::vector<std::string> files;
  for (const char* name : {"rnd", "exsh", "ksh", "escs", "fedj_ex", "fedj_k"}) {
    files.push_back(write_run(name, records_with_energy({2, 2, 2})));
  }
  const auto out = (dir_ / "plot.svg").string();
  emit_plot(files, out);
  std::ifstream in(out);
  const std::string svg((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(count(svg, "class=\"accuracy\""), 6u);
  EXPECT_EQ(count(svg, "class=\"legend\""), 6u);
  EXPECT_NE(svg.find(">fedj_ex<"), std::string::npos);
}

TEST_F(PlotTest, EmptyMetricsAnnotated) {
  const auto series = load_series(write_run("rnd", {}));
  const auto svg = render_svg(std::span(&series, 1));
  EXPECT_NE(svg.find("class=\"annotation\""), std::string::npos);
  EXPECT_EQ(count(svg, "class=\"accuracy\""), 0u);
}

TEST_F(PlotTest, MalformedIsParseError) {
  const auto path = dir_ / "broken.csv";
  std::ofstream(path) << "round,cohort\n1,2\n";
  EXPECT_THROW(load_series(path.string()), ParseError);
  EXPECT_THROW(load_series((dir_ / "missing.csv").string()), IoError);
}

}  // namespace
}  // namespace ebfl
