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

#include <array>
#include <string_view>

// Reference success-rate values used as analytics oracles. Per-baseline
// columns follow kBaselines; reported Overall values are as printed.
namespace roleeval::testing::reference {

inline constexpr std::array<std::string_view, 7> kBaselines = {
    "RPP-gpt-3.5", "RoleGPT-gpt-3.5", "Juliet-gpt-3.5", "RPP-gpt-4", "RoleGPT-gpt-4", "Juliet-gpt-4", "GPTs"};

struct HumanRow {
  std::string_view code;
  std::array<double, 7> cells;
  double reported_overall;
};

inline constexpr std::array<HumanRow, 11> kHumanTable = {{
    {"CR", {40.0, 53.3, 31.3, 26.1, 37.0, 37.5, 47.8}, 39.0},
    {"ED", {43.5, 30.0, 44.4, 38.9, 27.3, 44.4, 47.8}, 39.5},
    {"LG", {23.5, 50.0, 36.4, 42.1, 47.6, 47.1, 41.7}, 41.2},
    {"PH", {26.7, 38.9, 43.5, 44.0, 28.0, 40.9, 34.8}, 36.7},
    {"PS", {17.4, 23.3, 34.8, 46.2, 46.7, 48.0, 54.6}, 38.7},
    {"IP", {42.1, 45.2, 40.0, 35.0, 83.3, 41.7, 56.0}, 49.0},
    {"EM", {44.4, 57.9, 22.2, 66.7, 25.0, 55.6, 45.8}, 45.4},
    {"FP", {38.9, 59.1, 37.5, 60.0, 50.0, 50.0, 50.0}, 49.4},
    {"IS", {50.0, 34.8, 61.5, 45.0, 50.0, 35.5, 50.0}, 46.7},
    {"IT", {48.0, 41.7, 30.0, 66.7, 22.7, 33.3, 53.9}, 42.3},
    {"Overall", {37.5, 43.4, 38.2, 47.1, 41.8, 43.4, 48.2}, 42.8},
}};

struct JudgeRates {
  std::string_view judge;
  double identify_human;
  double identify_nonhuman;
  double disparity;  // display-rounded
};

inline constexpr std::array<JudgeRates, 2> kDisparities = {{
    {"gpt-4", 91.4, 27.9, 63.5},
    {"gpt-4-turbo", 96.5, 56.5, 40.0},
}};

// Per-baseline judge rates, identify-human and identify-nonhuman modes.
inline constexpr std::array<double, 7> kControlHuman = {86.0, 78.0, 67.0, 95.0, 31.0, 5.0, 78.0};
inline constexpr std::array<double, 7> kControlNonhuman = {14.0, 22.0, 33.0, 5.0, 69.0, 95.0, 22.0};
inline constexpr std::array<double, 7> kGeminiHuman = {52.7, 52.7, 62.7, 56.3, 60.7, 58.3, 54.0};
inline constexpr std::array<double, 7> kGeminiNonhuman = {51.0, 49.0, 42.3, 48.7, 54.3, 50.0, 48.7};
inline constexpr std::array<double, 7> kGpt4Human = {85.3, 92.3, 88.3, 63.7, 93.0, 91.3, 95.7};
inline constexpr std::array<double, 7> kGpt4TurboHuman = {95.0, 94.0, 95.3, 95.7, 99.0, 98.0, 98.3};
inline constexpr std::array<double, 7> kGpt4Nonhuman = {25.7, 24.7, 26.0, 25.7, 29.0, 52.3, 11.7};
inline constexpr std::array<double, 7> kGpt4TurboNonhuman = {61.7, 62.7, 53.3, 34.3, 60.0, 58.0, 62.3};

// Pearson r against the control series of the same mode (numpy.corrcoef).
inline constexpr double kRGeminiHuman = -0.5181194332477328;
inline constexpr double kRGeminiNonhuman = 0.3145093376790755;
inline constexpr double kRGpt4Human = -0.4753815352353463;
inline constexpr double kRGpt4TurboHuman = -0.6411649709671197;
inline constexpr double kRGpt4Nonhuman = 0.7864297399966279;
inline constexpr double kRGpt4TurboNonhuman = 0.313822505714499;

}  // namespace roleeval::testing::reference
