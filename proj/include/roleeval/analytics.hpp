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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleeval/judge.hpp"
#include "roleeval/questionbank.hpp"

namespace roleeval {

// One verdict on one pair/item, from a human session or a judge iteration.
struct Observation {
  std::string baseline_id;
  QuestionCategory category = QuestionCategory::kCR;
  int selection = 0;
  int truth_slot = 0;
  JudgeMode mode = JudgeMode::kIdentifyHuman;
  std::string judge;  // "human" or a judge label
  int iteration = 1;
};

inline bool is_deception(const Observation& o) { return is_deception(o.selection, o.truth_slot, o.mode); }

// Reads verdict-log records ({judge, mode, iteration, items: [...]}).
std::vector<Observation> observations_from_records(const nlohmann::json& records);
std::vector<Observation> load_observations(const std::filesystem::path& jsonl_path);

enum class GroupBy { kBaseline, kCategory, kBaselineCategory };
enum class Convention { kCell, kMicro, kMacro };

std::string_view convention_name(Convention c);  // "cell", "micro", "macro"

struct RateCell {
  double percent = 0.0;  // full precision
  Convention convention = Convention::kCell;
  std::size_t deceptions = 0;  // pooled counts; for macro cells the row sums
  std::size_t total = 0;
  bool has_interval = false;  // Wilson 95%, counted cells only
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  bool row_max = false;
  bool closest_to_50 = false;
};

inline constexpr std::string_view kOverallLabel = "Overall";

struct SuccessRateTable {
  GroupBy group_by = GroupBy::kBaselineCategory;
  std::vector<std::string> rows;     // category codes, then "Overall"
  std::vector<std::string> columns;  // baseline ids, then "Overall"
  std::vector<std::vector<std::optional<RateCell>>> cells;  // absent = empty group
  std::optional<RateCell> grand_micro;  // all verdicts pooled

  const std::optional<RateCell>& at(std::string_view row, std::string_view column) const;
};

// Percent of deceptions per group. Empty groups are absent cells; throws
// kEmptyGroup when there are no observations at all. `baseline_order` fixes
// column order (default: sorted ids).
SuccessRateTable success_rate(std::span<const Observation> observations, GroupBy group_by,
                              std::span<const std::string> baseline_order = {});

// Unweighted mean. Throws kEmptyGroup on empty input.
double aggregate_overall(std::span<const double> cells);
double round_display(double percent);  // one decimal

double instruction_bias_disparity(double rate_identify_human, double rate_identify_nonhuman);

struct Correlation {
  double r = 0.0;
  std::size_t points = 0;
};

// Pearson r. Vectors must match in length (>= 3); kDegenerateVector on zero
// variance.
Correlation length_bias_correlation(std::span<const double> judge_rates, std::span<const double> control_rates);

// Wilson score interval in percent.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t total);

struct JudgeModeRates {
  std::string judge;
  double rate_identify_human = 0.0;
  double rate_identify_nonhuman = 0.0;
  std::vector<double> per_baseline_human;     // same order as BiasReport::baselines
  std::vector<double> per_baseline_nonhuman;
};

struct BiasEntry {
  std::string judge;
  double rate_identify_human = 0.0;
  double rate_identify_nonhuman = 0.0;
  double disparity = 0.0;
  std::optional<Correlation> length_corr_human;  // absent when degenerate
  std::optional<Correlation> length_corr_nonhuman;
};

struct BiasReport {
  std::vector<std::string> baselines;
  std::vector<BiasEntry> judges;
  JudgeModeRates control;
};

BiasReport make_bias_report(std::span<const JudgeModeRates> judges, const JudgeModeRates& control,
                            std::vector<std::string> baselines);

nlohmann::json to_json(const SuccessRateTable& table);
nlohmann::json to_json(const BiasReport& report);

// Long format: one line per cell with counts, interval and flags.
std::string table_csv(const SuccessRateTable& table);
// Category rows by baseline columns; '*' marks the row maximum, '_' the value closest to 50.
std::string table_text(const SuccessRateTable& table);
// Per-baseline 10-spoke series in CR..IT order.
nlohmann::json radar_json(const SuccessRateTable& table);

}  // namespace roleeval
