// Copyright 2026 The roleeval Authors.
//
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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "reference_data.hpp"
#include "roleeval/analytics.hpp"
#include "roleeval/error.hpp"
#include "test_support.hpp"

namespace roleeval {
namespace {

namespace ref = testing::reference;
using ::testing::HasSubstr;

// `deceptions` of `total` verdicts that fool an identify-human judge.
void add_cell(std::vector<Observation>& out, const std::string& baseline, QuestionCategory cat,
              std::size_t deceptions, std::size_t total, JudgeMode mode = JudgeMode::kIdentifyHuman) {
  for (std::size_t i = 0; i < total; ++i) {
    Observation o;
    o.baseline_id = baseline;
    o.category = cat;
    o.mode = mode;
    o.truth_slot = static_cast<int>(i % 2);
    bool deceive = i < deceptions;
    bool picks_truth = mode == JudgeMode::kIdentifyHuman ? !deceive : deceive;
    o.selection = picks_truth ? o.truth_slot : 1 - o.truth_slot;
    o.judge = "j";
    out.push_back(o);
  }
}

// Pearson r from raw sums, independent of the centred implementation.
double pearson_sums(std::span<const double> x, std::span<const double> y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(SuccessRate, CellPercentAndInterval) {
  std::vector<Observation> obs;
  add_cell(obs, "b1", QuestionCategory::kCR, 29, 60);
  auto table = success_rate(obs, GroupBy::kBaselineCategory);
  const auto& cell = table.at("CR", "b1");
  ASSERT_TRUE(cell);
  EXPECT_DOUBLE_EQ(cell->percent, 100.0 * 29 / 60);
  EXPECT_EQ(round_display(cell->percent), 48.3);
  EXPECT_EQ(cell->deceptions, 29u);
  EXPECT_EQ(cell->total, 60u);
  EXPECT_EQ(cell->convention, Convention::kCell);
  // Wilson 95% from the closed form, computed in Python.
  EXPECT_NEAR(cell->wilson_low, 36.17504953973278, 1e-9);
  EXPECT_NEAR(cell->wilson_high, 60.69218996740751, 1e-9);
  EXPECT_FALSE(table.at("ED", "b1").has_value());
}

TEST(SuccessRate, AllCorrectIsZero) {
  std::vector<Observation> obs;
  add_cell(obs, "b1", QuestionCategory::kED, 0, 10);
  auto table = success_rate(obs, GroupBy::kBaselineCategory);
  EXPECT_EQ(table.at("ED", "b1")->percent, 0.0);
  EXPECT_EQ(table.at(kOverallLabel, kOverallLabel)->percent, 0.0);
}

TEST(SuccessRate, NonhumanModeCountsCorrectPicksOfTruth) {
  std::vector<Observation> obs;
  add_cell(obs, "b1", QuestionCategory::kLG, 3, 4, JudgeMode::kIdentifyNonhuman);
  EXPECT_EQ(success_rate(obs, GroupBy::kBaselineCategory).at("LG", "b1")->percent, 75.0);
}

TEST(SuccessRate, RowFlags) {
  std::vector<Observation> obs;
  add_cell(obs, "a", QuestionCategory::kPS, 11, 23);   // 47.8
  add_cell(obs, "b", QuestionCategory::kPS, 59, 108);  // 54.6
  add_cell(obs, "a", QuestionCategory::kCR, 5, 10);    // 50.0
  add_cell(obs, "b", QuestionCategory::kCR, 1, 2);     // 50.0
  auto t = success_rate(obs, GroupBy::kBaselineCategory);
  EXPECT_EQ(round_display(t.at("PS", "a")->percent), 47.8);
  EXPECT_EQ(round_display(t.at("PS", "b")->percent), 54.6);
  EXPECT_TRUE(t.at("PS", "b")->row_max);
  EXPECT_FALSE(t.at("PS", "a")->row_max);
  EXPECT_TRUE(t.at("PS", "a")->closest_to_50);
  EXPECT_FALSE(t.at("PS", "b")->closest_to_50);
  // Ties are flagged jointly.
  EXPECT_TRUE(t.at("CR", "a")->row_max && t.at("CR", "b")->row_max);
  EXPECT_TRUE(t.at("CR", "a")->closest_to_50 && t.at("CR", "b")->closest_to_50);
  EXPECT_FALSE(t.at("CR", kOverallLabel)->row_max);
}

TEST(SuccessRate, OverallConventions) {
  std::vector<Observation> obs;
  add_cell(obs, "a", QuestionCategory::kCR, 1, 10);  // 10
  add_cell(obs, "b", QuestionCategory::kCR, 9, 30);  // 30
  add_cell(obs, "a", QuestionCategory::kED, 6, 10);  // 60
  auto t = success_rate(obs, GroupBy::kBaselineCategory);
  // Overall column: unweighted mean of the present cells.
  EXPECT_DOUBLE_EQ(t.at("CR", kOverallLabel)->percent, 20.0);
  EXPECT_EQ(t.at("CR", kOverallLabel)->convention, Convention::kMacro);
  EXPECT_FALSE(t.at("CR", kOverallLabel)->has_interval);
  EXPECT_DOUBLE_EQ(t.at("ED", kOverallLabel)->percent, 60.0);
  // Overall row: pooled verdicts per baseline.
  EXPECT_DOUBLE_EQ(t.at(kOverallLabel, "a")->percent, 35.0);
  EXPECT_EQ(t.at(kOverallLabel, "a")->convention, Convention::kMicro);
  EXPECT_DOUBLE_EQ(t.at(kOverallLabel, "b")->percent, 30.0);
  EXPECT_DOUBLE_EQ(t.at(kOverallLabel, kOverallLabel)->percent, 32.5);
  EXPECT_DOUBLE_EQ(t.grand_micro->percent, 100.0 * 16 / 50);

  auto by_cat = success_rate(obs, GroupBy::kCategory);
  EXPECT_EQ(by_cat.columns, std::vector<std::string>{std::string(kOverallLabel)});
  EXPECT_DOUBLE_EQ(by_cat.at("CR", kOverallLabel)->percent, 25.0);

  auto by_base = success_rate(obs, GroupBy::kBaseline);
  EXPECT_EQ(by_base.rows, std::vector<std::string>{std::string(kOverallLabel)});
  EXPECT_DOUBLE_EQ(by_base.at(kOverallLabel, "a")->percent, 35.0);
}

TEST(SuccessRate, PermutationInvariant) {
  std::vector<Observation> obs;
  add_cell(obs, "a", QuestionCategory::kCR, 7, 19);
  add_cell(obs, "b", QuestionCategory::kIT, 4, 9);
  add_cell(obs, "b", QuestionCategory::kCR, 2, 13);
  auto base = to_json(success_rate(obs, GroupBy::kBaselineCategory));
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(obs.begin(), obs.end(), gen);
    EXPECT_EQ(to_json(success_rate(obs, GroupBy::kBaselineCategory)), base);
  }
}

TEST(SuccessRate, BaselineOrderAndEmpty) {
  std::vector<Observation> obs;
  add_cell(obs, "a", QuestionCategory::kCR, 1, 2);
  add_cell(obs, "b", QuestionCategory::kCR, 1, 2);
  std::vector<std::string> order = {"b", "a"};
  auto t = success_rate(obs, GroupBy::kBaselineCategory, order);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"b", "a", "Overall"}));
  EXPECT_EQ(kind_of([] { success_rate({}, GroupBy::kBaseline); }), ErrorKind::kEmptyGroup);
  std::vector<std::string> none = {"zzz"};
  EXPECT_EQ(kind_of([&] { success_rate(obs, GroupBy::kBaseline, none); }), ErrorKind::kEmptyGroup);
}

TEST(AggregateOverall, MatchesReportedOverallColumn) {
  for (const auto& row : ref::kHumanTable) {
    EXPECT_NEAR(aggregate_overall(row.cells), row.reported_overall, 0.05) << row.code;
  }
  EXPECT_EQ(kind_of([] { aggregate_overall({}); }), ErrorKind::kEmptyGroup);
}

TEST(Disparity, AbsoluteDifference) {
  for (const auto& j : ref::kDisparities) {
    double d = instruction_bias_disparity(j.identify_human, j.identify_nonhuman);
    EXPECT_EQ(round_display(d), j.disparity) << j.judge;
  }
  EXPECT_EQ(instruction_bias_disparity(20.0, 70.0), 50.0);
}

TEST(Correlation, SelfNegationAndReference) {
  std::vector<double> x(ref::kGeminiHuman.begin(), ref::kGeminiHuman.end());
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  EXPECT_NEAR(length_bias_correlation(x, x).r, 1.0, 1e-12);
  EXPECT_NEAR(length_bias_correlation(x, neg).r, -1.0, 1e-12);

  auto check = [](const auto& judge, const auto& control, double frozen) {
    Correlation c = length_bias_correlation(judge, control);
    EXPECT_EQ(c.points, 7u);
    EXPECT_NEAR(c.r, frozen, 1e-12);
    EXPECT_NEAR(c.r, pearson_sums(judge, control), 1e-9);
  };
  check(ref::kGeminiHuman, ref::kControlHuman, ref::kRGeminiHuman);
  check(ref::kGeminiNonhuman, ref::kControlNonhuman, ref::kRGeminiNonhuman);
  check(ref::kGpt4Human, ref::kControlHuman, ref::kRGpt4Human);
  check(ref::kGpt4TurboHuman, ref::kControlHuman, ref::kRGpt4TurboHuman);
  check(ref::kGpt4Nonhuman, ref::kControlNonhuman, ref::kRGpt4Nonhuman);
  check(ref::kGpt4TurboNonhuman, ref::kControlNonhuman, ref::kRGpt4TurboNonhuman);
}

TEST(Correlation, Errors) {
  std::vector<double> flat(5, 50.0), x = {1, 2, 3, 4, 5}, two = {1, 2}, four = {1, 2, 3, 4};
  EXPECT_EQ(kind_of([&] { length_bias_correlation(flat, x); }), ErrorKind::kDegenerateVector);
  EXPECT_EQ(kind_of([&] { length_bias_correlation(x, four); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { length_bias_correlation(two, two); }), ErrorKind::kInvalidArgument);
}

TEST(Wilson, Extremes) {
  auto [lo0, hi0] = wilson_interval(0, 10);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 27.75327998628892, 1e-9);
  auto [lo1, hi1] = wilson_interval(10, 10);
  EXPECT_NEAR(lo1, 72.24672001371107, 1e-9);
  EXPECT_LE(hi1, 100.0);
  EXPECT_EQ(kind_of([] { wilson_interval(0, 0); }), ErrorKind::kEmptyGroup);
}

TEST(BiasReport, DegenerateCorrelationIsAbsent) {
  JudgeModeRates control{"control", 50, 50, {1, 2, 3}, {4, 4, 4}};
  JudgeModeRates judge{"j", 90, 30, {3, 2, 1}, {1, 2, 3}};
  auto report = make_bias_report(std::vector{judge}, control, {"a", "b", "c"});
  ASSERT_EQ(report.judges.size(), 1u);
  EXPECT_EQ(report.judges[0].disparity, 60.0);
  ASSERT_TRUE(report.judges[0].length_corr_human);
  EXPECT_NEAR(report.judges[0].length_corr_human->r, -1.0, 1e-12);
  EXPECT_FALSE(report.judges[0].length_corr_nonhuman);
  auto j = to_json(report);
  EXPECT_TRUE(j.contains("judges"));
}

TEST(Exports, RadarOrderAndCsvOverall) {
  std::vector<Observation> obs;
  std::vector<double> cr_cells;
  for (int b = 0; b < 3; ++b) {
    add_cell(obs, "b" + std::to_string(b), QuestionCategory::kIT, 1, 4);
    add_cell(obs, "b" + std::to_string(b), QuestionCategory::kCR, static_cast<std::size_t>(b + 1), 7);
    cr_cells.push_back(100.0 * (b + 1) / 7);
  }
  auto t = success_rate(obs, GroupBy::kBaselineCategory);
  auto radar = radar_json(t);
  EXPECT_EQ(radar["categories"], nlohmann::json({"CR", "ED", "LG", "PH", "PS", "IP", "EM", "FP", "IS", "IT"}));
  ASSERT_EQ(radar["series"].size(), 3u);
  EXPECT_EQ(radar["series"][0]["baseline"], "b0");
  EXPECT_DOUBLE_EQ(radar["series"][0]["values"][0].get<double>(), 100.0 / 7);
  EXPECT_TRUE(radar["series"][0]["values"][1].is_null());
  EXPECT_DOUBLE_EQ(radar["series"][2]["values"][9].get<double>(), 25.0);

  std::string csv = table_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "row,column,convention,deceptions,total,percent,display,wilson_low,wilson_high,row_max,closest_to_50");
  std::string overall_line;
  std::istringstream lines(csv);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("CR,Overall,", 0) == 0) overall_line = line;
  }
  ASSERT_FALSE(overall_line.empty());
  EXPECT_THAT(overall_line, HasSubstr(",macro,"));
  EXPECT_DOUBLE_EQ(t.at("CR", kOverallLabel)->percent, aggregate_overall(cr_cells));
  EXPECT_THAT(overall_line, HasSubstr(",28.6,"));

  std::string text = table_text(t);
  EXPECT_THAT(text, HasSubstr("Creativity"));
  EXPECT_THAT(text, HasSubstr("All verdicts pooled"));
}

TEST(Observations, FromRecordsAndJsonl) {
  nlohmann::json rec = {{"judge", "gpt-4"},
                        {"mode", "identify_nonhuman"},
                        {"iteration", 2},
                        {"items",
                         {{{"question_id", "q"}, {"category", "EM"}, {"baseline_id", "b"}, {"truth_slot", 1},
                           {"selection", 1}}}}};
  testing::TempDir dir;
  std::ofstream(dir / "v.jsonl") << rec.dump() << "\n\n" << rec.dump() << "\n";
  auto obs = load_observations(dir / "v.jsonl");
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0].category, QuestionCategory::kEM);
  EXPECT_EQ(obs[0].iteration, 2);
  EXPECT_TRUE(is_deception(obs[0]));
  rec["items"][0]["selection"] = 2;
  EXPECT_EQ(kind_of([&] { observations_from_records(nlohmann::json::array({rec})); }), ErrorKind::kParseError);
}

}  // namespace
}  // namespace roleeval
