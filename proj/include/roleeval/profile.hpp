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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace roleeval {

enum class ProfileCategory {
  kBackgroundInterests,
  kPersonalIdentity,
  kCulturalPreferences,
  kCognitionSocial,
};

std::string_view category_code(ProfileCategory category);
ProfileCategory profile_category_from_code(std::string_view code);

// One of the ten questionnaire rows, in canonical order.
struct CanonicalItem {
  std::string_view key;
  std::string_view title;
  std::string_view question_text;
  ProfileCategory category;
};

std::span<const CanonicalItem> canonical_items();
const CanonicalItem* find_canonical_item(std::string_view key);

struct BackgroundItem {
  std::string key;
  ProfileCategory category = ProfileCategory::kBackgroundInterests;
  std::string question_text;
  std::string answer_text;

  bool operator==(const BackgroundItem&) const = default;
};

// display_name is substituted into persona prompts only; evaluator-facing
// artifacts carry person_id at most.
struct PersonProfile {
  std::string person_id;
  std::string display_name;
  std::string one_line_description;
  std::vector<BackgroundItem> items;

  bool operator==(const PersonProfile&) const = default;
};

struct Violation {
  std::string key;   // offending item key, or field name for profile-level issues
  std::string code;  // "missing_item", "empty_answer", ...
  std::string message;
};

using ValidationReport = std::vector<Violation>;

// Lists every violated invariant; empty iff the profile is valid.
ValidationReport validate_profile(const PersonProfile& candidate);

struct ProfileReject {
  std::size_t index = 0;  // position in the source array
  std::string person_id;
  ValidationReport report;
};

struct LoadedProfiles {
  std::vector<PersonProfile> profiles;
  std::vector<ProfileReject> rejects;
};

// Profile files are a JSON array of profile objects. Invalid records are
// returned as rejects, never dropped. Throws kParseError for a malformed or
// empty file and kIoError when it cannot be read.
LoadedProfiles load_profiles(const std::filesystem::path& path);
LoadedProfiles parse_profiles(std::string_view json_text);
void save_profiles(const std::filesystem::path& path, std::span<const PersonProfile> profiles);

nlohmann::json to_json(const PersonProfile& profile);
PersonProfile profile_from_json(const nlohmann::json& j);

// Items sorted into canonical key order; unknown keys last, by key.
PersonProfile canonicalize(const PersonProfile& profile);

// "Q: <question>\nA: <answer>\n" per item in canonical order, separated by a
// blank line. Throws kInvalidProfile for an invalid profile.
std::string render_background(const PersonProfile& profile);

struct AnswerLength {
  std::string key;
  std::size_t words = 0;
  std::size_t characters = 0;
};

std::vector<AnswerLength> answer_lengths(const PersonProfile& profile);

const PersonProfile& find_profile(std::span<const PersonProfile> profiles, std::string_view person_id);

}  // namespace roleeval
