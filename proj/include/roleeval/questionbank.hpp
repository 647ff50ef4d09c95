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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/profile.hpp"

namespace roleeval {

// Declaration order is the radar/table order: CR ED LG PH PS IP EM FP IS IT.
enum class QuestionCategory { kCR, kED, kLG, kPH, kPS, kIP, kEM, kFP, kIS, kIT };

enum class QuestionScope { kGeneral, kSpecific };

std::span<const QuestionCategory> all_question_categories();
QuestionScope scope_of(QuestionCategory category);
std::string_view code_of(QuestionCategory category);
// Table row label, e.g. "Ethical Dilemmas".
std::string_view display_name(QuestionCategory category);
std::string category_definition(QuestionCategory category);
QuestionCategory question_category_from_code(std::string_view code);

enum class QuestionStatus { kCandidate, kAccepted, kExcluded };

std::string_view status_name(QuestionStatus status);
QuestionStatus status_from_name(std::string_view name);

struct Question {
  std::string question_id;
  QuestionCategory category = QuestionCategory::kCR;
  std::string text;
  std::optional<std::string> target_person;  // present iff specific scope
  QuestionStatus status = QuestionStatus::kCandidate;
  std::optional<std::string> exclusion_reason;  // present iff excluded

  bool operator==(const Question&) const = default;
};

// Throws kInvalidArgument when a Question invariant is violated.
void validate_question(const Question& q);

struct Exam {
  std::string exam_id;
  std::string person_id;
  std::vector<Question> questions;  // 10, one per category, seeded order
  std::uint64_t seed = 0;

  const Question& question(std::string_view question_id) const;
  bool contains(std::string_view question_id) const;
};

void validate_exam(const Exam& exam);

nlohmann::json to_json(const Question& q);
Question question_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Exam& exam);
Exam exam_from_json(const nlohmann::json& j);

std::vector<Question> load_question_pool(const std::filesystem::path& path);
void save_question_pool(const std::filesystem::path& path, std::span<const Question> pool);

// Questions in "1. text" / "2) text" lines, in order of appearance.
std::vector<std::string> parse_numbered_lines(std::string_view text);

// Candidate questions from the model. Re-asks up to twice when the reply
// holds fewer than `count` numbered questions, then throws kParseError.
std::vector<Question> generate_general_questions(ChatClient& client, const ModelSpec& model,
                                                 QuestionCategory category, int count);
std::vector<Question> generate_specific_questions(ChatClient& client, const ModelSpec& model,
                                                  const PersonProfile& profile,
                                                  QuestionCategory category, int count);

struct FilterOverride {
  QuestionStatus status = QuestionStatus::kExcluded;
  std::string reason = "manual override";
};

struct FilterConfig {
  std::vector<std::string> specialist_terms;  // matched case-insensitively
  std::size_t max_words = 60;
  std::map<std::string, FilterOverride> overrides;  // by question_id

  static FilterConfig from_json(const nlohmann::json& j);
  static FilterConfig load(const std::filesystem::path& path);
};

inline constexpr std::string_view kJargonReason = "jargon screen";
inline constexpr std::string_view kLengthReason = "length screen";
inline constexpr std::string_view kOverrideReason = "manual override";

// Accepts or excludes every candidate: jargon screen, then length screen,
// then manual overrides (which always win).
std::vector<Question> filter_questions(std::vector<Question> candidates, const FilterConfig& ruleset);

// One accepted question per category (specific ones targeting person_id,
// general ones untargeted), each drawn uniformly with the seeded generator,
// then a seeded shuffle of the ten. Throws kInsufficientPool naming the
// empty categories.
Exam assemble_exam(std::string_view person_id, std::span<const Question> pool, std::uint64_t seed);

}  // namespace roleeval
