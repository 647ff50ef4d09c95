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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/profile.hpp"
#include "roleeval/questionbank.hpp"

namespace roleeval {

enum class StrategyKind { kRPP, kRoleGPT, kJuliet, kGPTsBuilder };

std::string_view strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(std::string_view name);

// Default sampling parameters per strategy: RPP (0, 1), RoleGPT (0.7, 0.95),
// Juliet and GPTsBuilder (0.7, 1.0).
ModelSpec default_model_spec(StrategyKind kind, std::string provider_id, std::string model_id);

struct BaselineSpec {
  std::string baseline_id;
  StrategyKind strategy = StrategyKind::kRPP;
  ModelSpec model;
  // Allows RPP/RoleGPT sampling parameters other than the pinned ones.
  bool allow_parameter_override = false;
};

// Throws kInvalidParameters when pinned parameters are changed without the
// override flag, kInvalidArgument for a malformed spec.
void validate_baseline(const BaselineSpec& baseline);
BaselineSpec make_baseline(std::string baseline_id, StrategyKind strategy, std::string provider_id,
                           std::string model_id);

nlohmann::json to_json(const BaselineSpec& baseline);
BaselineSpec baseline_from_json(const nlohmann::json& j);

struct ExemplarPair {
  std::string question;
  std::string response;
  bool operator==(const ExemplarPair&) const = default;
};

struct PersonaSession {
  std::string baseline_id;
  std::string person_id;
  StrategyKind strategy = StrategyKind::kRPP;
  ModelSpec model;
  std::vector<ChatMessage> preamble;
  // Strategy intermediates: RPP "role_setting"/"feedback_prompt", RoleGPT
  // "generated_description"/"second_person_description", GPTs "instruction".
  std::map<std::string, std::string> artifacts;
  std::vector<ExemplarPair> exemplars;                // RoleGPT only
  std::vector<ChatMessage> construction_transcript;  // RPP stage one, RoleGPT phases

  bool operator==(const PersonaSession&) const = default;
};

nlohmann::json to_json(const PersonaSession& session);
PersonaSession session_from_json(const nlohmann::json& j);

PersonaSession build_rpp_session(ChatClient& client, const BaselineSpec& baseline,
                                 const PersonProfile& profile);
PersonaSession build_rolegpt_session(ChatClient& client, const BaselineSpec& baseline,
                                     const PersonProfile& profile);
PersonaSession build_juliet_session(const BaselineSpec& baseline, const PersonProfile& profile);
PersonaSession build_gpts_session(const BaselineSpec& baseline, const PersonProfile& profile);
PersonaSession build_session(ChatClient& client, const BaselineSpec& baseline, const PersonProfile& profile);

// "Question k:" / "Response:" items; "Factualness:" lines are dropped.
std::vector<ExemplarPair> parse_exemplars(std::string_view text);

// Answers in a fresh context: preamble + the question as the final user turn.
ResponseRecord answer_question(ChatClient& client, const PersonaSession& session, const Question& question,
                               const MisspellingDictionary& dictionary, std::int64_t created_at);

}  // namespace roleeval
