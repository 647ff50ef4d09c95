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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/questionbank.hpp"
#include "roleeval/roleplay.hpp"

namespace roleeval {

// End-to-end run: profiles -> questions/exams -> personas -> answers ->
// evaluator sessions -> judge forms and verdicts -> reports.
struct PipelineConfig {
  std::filesystem::path profiles_path;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::int64_t timestamp = 0;  // stamped on every record; fixed for replay
  std::vector<BaselineSpec> baselines;
  std::vector<ModelSpec> judges;
  ModelSpec question_model;
  int iterations = 3;
  int general_candidates = 6;   // per general category
  int specific_candidates = 4;  // per person and specific category
  FilterConfig filter;
  MisspellingDictionary dictionary;
  // Human answers as {person_id: [{question_id, text}]}. When absent, each
  // answer is drawn from the person's own profile answers (simulated).
  std::optional<std::filesystem::path> human_answers_path;
  // Simulated evaluators per person; each makes seeded coin-flip choices.
  int simulated_evaluators = 0;

  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
};

// The seven default baselines (RPP, RoleGPT and Juliet on two models,
// plus GPTs builder) on one provider.
std::vector<BaselineSpec> default_baselines(const std::string& provider_id);

struct PipelineSummary {
  std::size_t persons = 0;
  std::size_t rejected_profiles = 0;
  std::size_t responses = 0;
  std::size_t evaluator_sessions = 0;
  std::size_t judge_verdict_sets = 0;
  std::size_t judge_failed_iterations = 0;
  std::vector<std::filesystem::path> files;  // relative to output_dir, sorted
};

PipelineSummary run_pipeline(ChatClient& client, const PipelineConfig& config);

// Writes reports/ from the verdict logs of a run directory: one table per
// verdict source and mode (CSV, text, JSON), radar data and the bias report.
std::vector<std::filesystem::path> write_reports(const std::filesystem::path& run_dir);

// Pretty JSON with a trailing newline, written via a temp file.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);
void write_text_file(const std::filesystem::path& path, std::string_view text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace roleeval
