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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/questionbank.hpp"

namespace roleeval {

enum class JudgeMode { kIdentifyHuman, kIdentifyNonhuman };

std::string_view mode_name(JudgeMode mode);  // "identify_human" / "identify_nonhuman"
JudgeMode mode_from_name(std::string_view name);  // also accepts "identify-human" etc.

// A deception is a selection that lets the machine answer pass: picking the
// machine as human, or picking the human as the machine.
inline bool is_deception(int selection, int truth_slot, JudgeMode mode) {
  return mode == JudgeMode::kIdentifyHuman ? selection != truth_slot : selection == truth_slot;
}

struct JudgeRunConfig {
  int n_persons = 1;
  int m_baselines = 7;
  int l_questions = 10;
  int iterations = 3;
  JudgeMode mode = JudgeMode::kIdentifyHuman;
  ModelSpec judge_model;  // temperature 0 by default
  std::uint64_t seed = 0;

  void validate() const;
};

struct JudgeItem {
  std::string question_id;
  QuestionCategory category = QuestionCategory::kCR;
  std::string question_text;
  std::string answer0;
  std::string answer1;
  int truth_slot = 0;  // slot of the human answer
  std::string baseline_id;

  bool operator==(const JudgeItem&) const = default;
};

struct JudgeForm {
  std::string form_id;
  std::string person_id;
  std::vector<JudgeItem> items;

  bool operator==(const JudgeForm&) const = default;
};

struct JudgeVerdictSet {
  std::string form_id;
  int iteration = 1;
  std::vector<int> selections;
  JudgeMode mode = JudgeMode::kIdentifyHuman;
};

struct JudgeRunResult {
  std::vector<JudgeVerdictSet> verdicts;  // successful iterations, in order
  int failed_iterations = 0;
  std::vector<std::string> failures;
};

// Every exam question paired with every baseline's answer (l*m items, answer
// order a seeded coin per item), shuffled and split into m forms of l items.
// Throws kMissingResponse when an answer is absent.
std::vector<JudgeForm> build_judge_forms(const ResponseStore& store, const Exam& exam,
                                         std::span<const std::string> baselines, std::uint64_t seed);

std::string judge_system_prompt(JudgeMode mode, std::size_t question_count);
std::string judge_user_prompt(const JudgeForm& form, std::string_view background, JudgeMode mode);

// Slot choice per question 0..l-1. Reads the SELECTIONS block first, then
// falls back to scanning for Answer{slot}-{question} tokens. Throws
// kJudgeParseError when coverage is incomplete or contradictory.
std::vector<int> parse_judge_output(std::string_view text, std::size_t question_count);

// One call per iteration (iteration k uses replicate k-1), with up to two
// format re-asks. An iteration that still fails is skipped and counted;
// kJudgeParseError only when every iteration fails.
JudgeRunResult run_judge(ChatClient& client, const JudgeRunConfig& config, const JudgeForm& form,
                         std::string_view background);

// Length-bias control: always the longer answer (by code points of the
// normalized text); ties go to slot 0. The mode changes only what the pick
// means, so human/non-human control rates are complementary.
int control_model_select(const JudgeItem& item, JudgeMode mode);

JudgeVerdictSet run_control(const JudgeForm& form, JudgeMode mode);

std::size_t count_deceptions(const JudgeForm& form, const JudgeVerdictSet& verdicts);

// One JSON verdict-log record per form-iteration.
nlohmann::json verdict_log_record(const JudgeForm& form, const JudgeVerdictSet& verdicts, std::string_view judge);

nlohmann::json to_json(const JudgeForm& form);
JudgeForm form_from_json(const nlohmann::json& j);

}  // namespace roleeval
