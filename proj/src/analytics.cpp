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

#include "roleeval/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>

#include "roleeval/error.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Counts {
  std::size_t deceptions = 0;
  std::size_t total = 0;
  void add(bool deceived) {
    deceptions += deceived ? 1 : 0;
    ++total;
  }
};

RateCell counted_cell(const Counts& c, Convention convention) {
  RateCell cell;
  cell.convention = convention;
  cell.deceptions = c.deceptions;
  cell.total = c.total;
  cell.percent = 100.0 * static_cast<double>(c.deceptions) / static_cast<double>(c.total);
  cell.has_interval = true;
  std::tie(cell.wilson_low, cell.wilson_high) = wilson_interval(c.deceptions, c.total);
  return cell;
}

std::optional<RateCell> macro_cell(const std::vector<std::optional<RateCell>>& parts) {
  std::vector<double> values;
  RateCell cell;
  cell.convention = Convention::kMacro;
  for (const auto& p : parts) {
    if (!p) continue;
    values.push_back(p->percent);
    cell.deceptions += p->deceptions;
    cell.total += p->total;
  }
  if (values.empty()) return std::nullopt;
  cell.percent = aggregate_overall(values);
  return cell;
}

void flag_row(std::vector<std::optional<RateCell>>& row, std::size_t candidate_columns) {
  if (candidate_columns < 2) return;
  std::optional<double> best;
  std::optional<double> nearest;
  for (std::size_t c = 0; c < candidate_columns; ++c) {
    if (!row[c]) continue;
    double v = round_display(row[c]->percent);
    double d = round_display(std::abs(v - 50.0));
    best = best ? std::max(*best, v) : v;
    nearest = nearest ? std::min(*nearest, d) : d;
  }
  for (std::size_t c = 0; c < candidate_columns; ++c) {
    if (!row[c]) continue;
    double v = round_display(row[c]->percent);
    row[c]->row_max = v == *best;
    row[c]->closest_to_50 = round_display(std::abs(v - 50.0)) == *nearest;
  }
}

std::string fmt1(double v) { return fmt::format("{:.1f}", v); }

std::string row_display_label(const std::string& row) {
  if (row == kOverallLabel) return row;
  return std::string(display_name(question_category_from_code(row)));
}

}  // namespace

std::vector<Observation> observations_from_records(const nlohmann::json& records) {
  std::vector<Observation> out;
  try {
    for (const auto& rec : records) {
      JudgeMode mode = mode_from_name(rec.at("mode").get<std::string>());
      std::string judge = rec.value("judge", std::string("human"));
      int iteration = rec.value("iteration", 1);
      for (const auto& item : rec.at("items")) {
        Observation o;
        o.baseline_id = item.at("baseline_id").get<std::string>();
        o.category = question_category_from_code(item.at("category").get<std::string>());
        o.selection = item.at("selection").get<int>();
        o.truth_slot = item.at("truth_slot").get<int>();
        if ((o.selection != 0 && o.selection != 1) || (o.truth_slot != 0 && o.truth_slot != 1)) {
          throw Error(ErrorKind::kParseError, "slot values must be 0 or 1");
        }
        o.mode = mode;
        o.judge = judge;
        o.iteration = iteration;
        out.push_back(std::move(o));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed verdict record: ") + e.what());
  }
  return out;
}

std::vector<Observation> load_observations(const std::filesystem::path& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + jsonl_path.string());
  nlohmann::json records = nlohmann::json::array();
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParseError, jsonl_path.string() + ": " + e.what());
    }
  }
  return observations_from_records(records);
}

std::string_view convention_name(Convention c) {
  switch (c) {
    case Convention::kCell: return "cell";
    case Convention::kMicro: return "micro";
    case Convention::kMacro: return "macro";
  }
  return "cell";
}

const std::optional<RateCell>& SuccessRateTable::at(std::string_view row, std::string_view column) const {
  auto r = std::find(rows.begin(), rows.end(), row);
  auto c = std::find(columns.begin(), columns.end(), column);
  if (r == rows.end() || c == columns.end()) {
    throw Error(ErrorKind::kInvalidArgument, fmt::format("no cell {}/{}", row, column));
  }
  return cells[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(c - columns.begin())];
}

SuccessRateTable success_rate(std::span<const Observation> observations, GroupBy group_by,
                              std::span<const std::string> baseline_order) {
  if (observations.empty()) throw Error(ErrorKind::kEmptyGroup, "no verdicts to aggregate");

  std::vector<std::string> baselines(baseline_order.begin(), baseline_order.end());
  if (baselines.empty()) {
    std::set<std::string> seen;
    for (const auto& o : observations) seen.insert(o.baseline_id);
    baselines.assign(seen.begin(), seen.end());
  }
  std::map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < baselines.size(); ++i) column_of.emplace(baselines[i], i);

  const auto categories = all_question_categories();
  const std::size_t nb = baselines.size();
  const std::size_t nc = categories.size();
  std::vector<std::vector<Counts>> grid(nc, std::vector<Counts>(nb));
  Counts all;
  for (const auto& o : observations) {
    auto it = column_of.find(o.baseline_id);
    if (it == column_of.end()) continue;
    bool deceived = is_deception(o);
    grid[static_cast<std::size_t>(o.category)][it->second].add(deceived);
    all.add(deceived);
  }
  if (all.total == 0) throw Error(ErrorKind::kEmptyGroup, "no verdicts for the requested baselines");

  SuccessRateTable table;
  table.group_by = group_by;
  table.grand_micro = counted_cell(all, Convention::kMicro);

  auto column_counts = [&](std::size_t b) {
    Counts c;
    for (std::size_t k = 0; k < nc; ++k) {
      c.deceptions += grid[k][b].deceptions;
      c.total += grid[k][b].total;
    }
    return c;
  };

  if (group_by == GroupBy::kCategory) {
    table.columns = {std::string(kOverallLabel)};
    for (std::size_t k = 0; k < nc; ++k) {
      table.rows.emplace_back(code_of(categories[k]));
      Counts c;
      for (std::size_t b = 0; b < nb; ++b) {
        c.deceptions += grid[k][b].deceptions;
        c.total += grid[k][b].total;
      }
      table.cells.push_back({c.total ? std::optional(counted_cell(c, Convention::kMicro)) : std::nullopt});
    }
    table.rows.emplace_back(kOverallLabel);
    table.cells.push_back({table.grand_micro});
    return table;
  }

  table.columns = baselines;
  table.columns.emplace_back(kOverallLabel);
  if (group_by == GroupBy::kBaselineCategory) {
    for (std::size_t k = 0; k < nc; ++k) {
      table.rows.emplace_back(code_of(categories[k]));
      std::vector<std::optional<RateCell>> row;
      for (std::size_t b = 0; b < nb; ++b) {
        row.push_back(grid[k][b].total ? std::optional(counted_cell(grid[k][b], Convention::kCell)) : std::nullopt);
      }
      row.push_back(macro_cell(row));
      flag_row(row, nb);
      table.cells.push_back(std::move(row));
    }
  }
  table.rows.emplace_back(kOverallLabel);
  std::vector<std::optional<RateCell>> overall;
  for (std::size_t b = 0; b < nb; ++b) {
    Counts c = column_counts(b);
    overall.push_back(c.total ? std::optional(counted_cell(c, Convention::kMicro)) : std::nullopt);
  }
  overall.push_back(macro_cell(overall));
  flag_row(overall, nb);
  table.cells.push_back(std::move(overall));
  return table;
}

double aggregate_overall(std::span<const double> cells) {
  if (cells.empty()) throw Error(ErrorKind::kEmptyGroup, "no cells to aggregate");
  double sum = 0.0;
  for (double v : cells) sum += v;
  return sum / static_cast<double>(cells.size());
}

double round_display(double percent) { return std::round(percent * 10.0) / 10.0; }

double instruction_bias_disparity(double rate_identify_human, double rate_identify_nonhuman) {
  return std::abs(rate_identify_human - rate_identify_nonhuman);
}

Correlation length_bias_correlation(std::span<const double> judge_rates, std::span<const double> control_rates) {
  if (judge_rates.size() != control_rates.size()) {
    throw Error(ErrorKind::kInvalidArgument, "rate vectors differ in length");
  }
  const std::size_t n = judge_rates.size();
  if (n < 3) throw Error(ErrorKind::kInvalidArgument, "correlation needs at least 3 points");
  double mx = aggregate_overall(judge_rates);
  double my = aggregate_overall(control_rates);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = judge_rates[i] - mx;
    double dy = control_rates[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::kDegenerateVector, "rate vector has zero variance");
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), n};
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t total) {
  if (total == 0) throw Error(ErrorKind::kEmptyGroup, "interval of an empty group");
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {100.0 * std::max(0.0, center - half), 100.0 * std::min(1.0, center + half)};
}

BiasReport make_bias_report(std::span<const JudgeModeRates> judges, const JudgeModeRates& control,
                            std::vector<std::string> baselines) {
  BiasReport report;
  report.baselines = std::move(baselines);
  report.control = control;
  auto correlate = [](std::span<const double> a, std::span<const double> b) -> std::optional<Correlation> {
    if (a.size() != b.size() || a.size() < 3) return std::nullopt;
    try {
      return length_bias_correlation(a, b);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDegenerateVector) return std::nullopt;
      throw;
    }
  };
  for (const auto& j : judges) {
    BiasEntry e;
    e.judge = j.judge;
    e.rate_identify_human = j.rate_identify_human;
    e.rate_identify_nonhuman = j.rate_identify_nonhuman;
    e.disparity = instruction_bias_disparity(j.rate_identify_human, j.rate_identify_nonhuman);
    e.length_corr_human = correlate(j.per_baseline_human, control.per_baseline_human);
    e.length_corr_nonhuman = correlate(j.per_baseline_nonhuman, control.per_baseline_nonhuman);
    report.judges.push_back(std::move(e));
  }
  return report;
}

nlohmann::json to_json(const SuccessRateTable& table) {
  auto cell_json = [](const std::optional<RateCell>& c) -> nlohmann::json {
    if (!c) return nullptr;
    nlohmann::json j = {{"percent", c->percent},
                        {"display", fmt1(c->percent)},
                        {"convention", convention_name(c->convention)},
                        {"deceptions", c->deceptions},
                        {"total", c->total},
                        {"row_max", c->row_max},
                        {"closest_to_50", c->closest_to_50}};
    if (c->has_interval) j["wilson95"] = {c->wilson_low, c->wilson_high};
    return j;
  };
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& row : table.cells) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& c : row) jr.push_back(cell_json(c));
    cells.push_back(std::move(jr));
  }
  return {{"rows", table.rows}, {"columns", table.columns}, {"cells", cells},
          {"grand_micro", cell_json(table.grand_micro)}};
}

nlohmann::json to_json(const BiasReport& report) {
  auto corr = [](const std::optional<Correlation>& c) -> nlohmann::json {
    if (!c) return nullptr;
    return {{"r", c->r}, {"points", c->points}};
  };
  nlohmann::json judges = nlohmann::json::array();
  for (const auto& e : report.judges) {
    judges.push_back({{"judge", e.judge},
                      {"identify_human", e.rate_identify_human},
                      {"identify_nonhuman", e.rate_identify_nonhuman},
                      {"disparity", e.disparity},
                      {"length_correlation_identify_human", corr(e.length_corr_human)},
                      {"length_correlation_identify_nonhuman", corr(e.length_corr_nonhuman)}});
  }
  return {{"baselines", report.baselines},
          {"judges", judges},
          {"control",
           {{"identify_human", report.control.rate_identify_human},
            {"identify_nonhuman", report.control.rate_identify_nonhuman},
            {"per_baseline_identify_human", report.control.per_baseline_human},
            {"per_baseline_identify_nonhuman", report.control.per_baseline_nonhuman}}}};
}

std::string table_csv(const SuccessRateTable& table) {
  std::string out =
      "row,column,convention,deceptions,total,percent,display,wilson_low,wilson_high,row_max,closest_to_50\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.cells[r][c];
      if (!cell) continue;
      out += fmt::format("{},{},{},{},{},{:.17g},{},{},{},{},{}\n", table.rows[r], table.columns[c],
                         convention_name(cell->convention), cell->deceptions, cell->total, cell->percent,
                         fmt1(cell->percent),
                         cell->has_interval ? fmt::format("{:.17g}", cell->wilson_low) : "",
                         cell->has_interval ? fmt::format("{:.17g}", cell->wilson_high) : "",
                         cell->row_max ? 1 : 0, cell->closest_to_50 ? 1 : 0);
    }
  }
  return out;
}

std::string table_text(const SuccessRateTable& table) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Success Rate (%)"};
  for (const auto& c : table.columns) header.push_back(c);
  grid.push_back(header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> line{row_display_label(table.rows[r])};
    for (const auto& cell : table.cells[r]) {
      if (!cell) {
        line.emplace_back("-");
        continue;
      }
      std::string s = fmt1(cell->percent);
      if (cell->row_max) s += "*";
      if (cell->closest_to_50) s += "_";
      line.push_back(std::move(s));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i == 0) {
        text += fmt::format("{:<{}}", line[i], width[i]);
      } else {
        text += fmt::format("  {:>{}}", line[i], width[i]);
      }
    }
    out += text + "\n";
  }
  std::string footer = "Overall column: macro (unweighted mean of row cells). Overall row: micro (pooled verdicts).";
  if (table.grand_micro) {
    footer += fmt::format(" All verdicts pooled: {} ({}/{}).", fmt1(table.grand_micro->percent),
                          table.grand_micro->deceptions, table.grand_micro->total);
  }
  out += footer + "\n* row maximum, _ closest to 50\n";
  return out;
}

nlohmann::json radar_json(const SuccessRateTable& table) {
  if (table.group_by != GroupBy::kBaselineCategory) {
    throw Error(ErrorKind::kInvalidArgument, "radar data needs a baseline x category table");
  }
  nlohmann::json categories = nlohmann::json::array();
  nlohmann::json labels = nlohmann::json::array();
  for (auto c : all_question_categories()) {
    categories.push_back(code_of(c));
    labels.push_back(display_name(c));
  }
  nlohmann::json series = nlohmann::json::array();
  for (std::size_t b = 0; b + 1 < table.columns.size(); ++b) {
    nlohmann::json values = nlohmann::json::array();
    for (auto c : all_question_categories()) {
      const auto& cell = table.at(code_of(c), table.columns[b]);
      values.push_back(cell ? nlohmann::json(cell->percent) : nlohmann::json(nullptr));
    }
    series.push_back({{"baseline", table.columns[b]}, {"values", values}});
  }
  return {{"categories", categories}, {"labels", labels}, {"series", series}};
}

}  // namespace roleeval
