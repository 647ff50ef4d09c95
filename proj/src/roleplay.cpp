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

#include "roleeval/roleplay.hpp"

#include <regex>

#include "roleeval/error.hpp"
#include "roleeval/templates.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

constexpr int kMaxReasks = 2;
constexpr std::size_t kExemplarCount = 10;
constexpr std::string_view kThirdPersonPrefix = "The character's description is:";
constexpr std::string_view kSecondPersonPrefix = "Your description is:";

void require_valid(const PersonProfile& profile) {
  ValidationReport report = validate_profile(profile);
  if (!report.empty()) {
    std::vector<std::string> keys;
    for (const auto& v : report) keys.push_back(v.key);
    throw Error(ErrorKind::kInvalidProfile,
                "profile '" + profile.person_id + "' is invalid: " + report.front().message, keys);
  }
}

PersonaSession new_session(const BaselineSpec& baseline, const PersonProfile& profile, StrategyKind expected) {
  validate_baseline(baseline);
  if (baseline.strategy != expected) {
    throw Error(ErrorKind::kInvalidArgument, "baseline " + baseline.baseline_id + " uses strategy " +
                                                 std::string(strategy_name(baseline.strategy)));
  }
  require_valid(profile);
  PersonaSession s;
  s.baseline_id = baseline.baseline_id;
  s.person_id = profile.person_id;
  s.strategy = baseline.strategy;
  s.model = baseline.model;
  return s;
}

nlohmann::json messages_json(const std::vector<ChatMessage>& messages) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : messages) out.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  return out;
}

std::vector<ChatMessage> messages_from_json(const nlohmann::json& j) {
  std::vector<ChatMessage> out;
  for (const auto& m : j) {
    out.push_back({role_from_name(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
  }
  return out;
}

std::string second_person(std::string converted) {
  converted = trim(converted);
  if (starts_with_icase(converted, kSecondPersonPrefix)) return converted;
  if (starts_with_icase(converted, kThirdPersonPrefix)) {
    converted = trim(converted.substr(kThirdPersonPrefix.size()));
  }
  return std::string(kSecondPersonPrefix) + " " + converted;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kRPP: return "RPP";
    case StrategyKind::kRoleGPT: return "RoleGPT";
    case StrategyKind::kJuliet: return "Juliet";
    case StrategyKind::kGPTsBuilder: return "GPTsBuilder";
  }
  return "RPP";
}

StrategyKind strategy_from_name(std::string_view name) {
  for (auto k : {StrategyKind::kRPP, StrategyKind::kRoleGPT, StrategyKind::kJuliet, StrategyKind::kGPTsBuilder}) {
    if (to_lower_ascii(strategy_name(k)) == to_lower_ascii(name)) return k;
  }
  if (to_lower_ascii(name) == "gpts") return StrategyKind::kGPTsBuilder;
  throw Error(ErrorKind::kInvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

ModelSpec default_model_spec(StrategyKind kind, std::string provider_id, std::string model_id) {
  ModelSpec spec;
  spec.provider_id = std::move(provider_id);
  spec.model_id = std::move(model_id);
  switch (kind) {
    case StrategyKind::kRPP:
      spec.temperature = 0.0;
      spec.top_p = 1.0;
      break;
    case StrategyKind::kRoleGPT:
      spec.temperature = 0.7;
      spec.top_p = 0.95;
      break;
    case StrategyKind::kJuliet:
    case StrategyKind::kGPTsBuilder:
      spec.temperature = 0.7;
      spec.top_p = 1.0;
      break;
  }
  return spec;
}

void validate_baseline(const BaselineSpec& baseline) {
  if (is_blank(baseline.baseline_id)) throw Error(ErrorKind::kInvalidArgument, "baseline_id is empty");
  baseline.model.validate();
  if (baseline.allow_parameter_override) return;
  const ModelSpec& m = baseline.model;
  if (baseline.strategy == StrategyKind::kRPP && m.temperature != 0.0) {
    throw Error(ErrorKind::kInvalidParameters,
                "RPP baseline " + baseline.baseline_id + " must use temperature 0 (set the override flag to change)");
  }
  if (baseline.strategy == StrategyKind::kRoleGPT && (m.temperature != 0.7 || m.top_p != 0.95)) {
    throw Error(ErrorKind::kInvalidParameters, "RoleGPT baseline " + baseline.baseline_id +
                                                   " must use temperature 0.7 and top_p 0.95 (set the override flag "
                                                   "to change)");
  }
}

BaselineSpec make_baseline(std::string baseline_id, StrategyKind strategy, std::string provider_id,
                           std::string model_id) {
  BaselineSpec b{std::move(baseline_id), strategy,
                 default_model_spec(strategy, std::move(provider_id), std::move(model_id)), false};
  validate_baseline(b);
  return b;
}

nlohmann::json to_json(const BaselineSpec& baseline) {
  return {{"baseline_id", baseline.baseline_id},
          {"strategy", strategy_name(baseline.strategy)},
          {"model", to_json(baseline.model)},
          {"allow_parameter_override", baseline.allow_parameter_override}};
}

BaselineSpec baseline_from_json(const nlohmann::json& j) {
  try {
    BaselineSpec b;
    b.baseline_id = j.at("baseline_id").get<std::string>();
    b.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    const auto& jm = j.at("model");
    ModelSpec defaults = default_model_spec(b.strategy, jm.at("provider_id").get<std::string>(),
                                            jm.at("model_id").get<std::string>());
    b.model = defaults;
    b.model.temperature = jm.value("temperature", defaults.temperature);
    b.model.top_p = jm.value("top_p", defaults.top_p);
    b.model.max_retries = jm.value("max_retries", defaults.max_retries);
    if (jm.contains("max_tokens") && !jm["max_tokens"].is_null()) b.model.max_tokens = jm["max_tokens"].get<int>();
    b.allow_parameter_override = j.value("allow_parameter_override", false);
    validate_baseline(b);
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed baseline: ") + e.what());
  }
}

nlohmann::json to_json(const PersonaSession& s) {
  nlohmann::json exemplars = nlohmann::json::array();
  for (const auto& e : s.exemplars) exemplars.push_back({{"question", e.question}, {"response", e.response}});
  return {{"baseline_id", s.baseline_id},
          {"person_id", s.person_id},
          {"strategy", strategy_name(s.strategy)},
          {"model", to_json(s.model)},
          {"preamble", messages_json(s.preamble)},
          {"artifacts", s.artifacts},
          {"exemplars", exemplars},
          {"construction_transcript", messages_json(s.construction_transcript)}};
}

PersonaSession session_from_json(const nlohmann::json& j) {
  try {
    PersonaSession s;
    s.baseline_id = j.at("baseline_id").get<std::string>();
    s.person_id = j.at("person_id").get<std::string>();
    s.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    s.model = model_spec_from_json(j.at("model"));
    s.preamble = messages_from_json(j.at("preamble"));
    s.artifacts = j.value("artifacts", std::map<std::string, std::string>{});
    for (const auto& e : j.value("exemplars", nlohmann::json::array())) {
      s.exemplars.push_back({e.at("question").get<std::string>(), e.at("response").get<std::string>()});
    }
    s.construction_transcript = messages_from_json(j.value("construction_transcript", nlohmann::json::array()));
    if (s.preamble.empty()) throw Error(ErrorKind::kParseError, "session has an empty preamble");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed session: ") + e.what());
  }
}

PersonaSession build_rpp_session(ChatClient& client, const BaselineSpec& baseline, const PersonProfile& profile) {
  PersonaSession s = new_session(baseline, profile, StrategyKind::kRPP);
  std::string role_setting = prompt_template("rpp_role_setting")
                                 .render({{"PERSON_NAME", profile.display_name},
                                          {"PERSON_DESCRIPTION", profile.one_line_description},
                                          {"BACKGROUND_INFO", render_background(profile)}});
  std::vector<ChatMessage> stage_one = {user_message(role_setting)};
  std::string feedback = trim(client.chat(baseline.model, stage_one));
  s.construction_transcript = {user_message(role_setting), assistant_message(feedback)};
  s.artifacts["role_setting"] = role_setting;
  s.artifacts["feedback_prompt"] = feedback;
  s.preamble = {system_message(role_setting + "\n" + feedback)};
  return s;
}

std::vector<ExemplarPair> parse_exemplars(std::string_view text) {
  static const std::regex kQuestion(R"(^\s*\**\s*Question\s*\d+\s*\**\s*[:.]\s*(.*)$)", std::regex::icase);
  static const std::regex kResponse(R"(^\s*\**\s*Response\s*\**\s*:\s*(.*)$)", std::regex::icase);
  static const std::regex kFactualness(R"(^\s*\**\s*Factualness\s*\**\s*:.*$)", std::regex::icase);

  std::vector<ExemplarPair> out;
  enum class Part { kNone, kQuestion, kFactualness, kResponse } part = Part::kNone;
  ExemplarPair current;
  auto flush = [&] {
    if (!is_blank(current.question) && !is_blank(current.response)) {
      out.push_back({trim(current.question), trim(current.response)});
    }
    current = {};
  };
  for (const auto& line : split_lines(text)) {
    std::smatch m;
    if (std::regex_match(line, m, kQuestion)) {
      flush();
      current.question = m[1].str();
      part = Part::kQuestion;
    } else if (std::regex_match(line, kFactualness)) {
      part = Part::kFactualness;
    } else if (std::regex_match(line, m, kResponse)) {
      current.response = m[1].str();
      part = Part::kResponse;
    } else if (!is_blank(line)) {
      if (part == Part::kQuestion) current.question += " " + trim(line);
      if (part == Part::kResponse) current.response += " " + trim(line);
    }
  }
  flush();
  return out;
}

PersonaSession build_rolegpt_session(ChatClient& client, const BaselineSpec& baseline,
                                     const PersonProfile& profile) {
  PersonaSession s = new_session(baseline, profile, StrategyKind::kRoleGPT);
  const std::string background = render_background(profile);

  // Role profile segmentation, step one: third-person description.
  std::vector<ChatMessage> describe = {
      system_message(std::string(prompt_template("rolegpt_describe_system").text)),
      user_message(prompt_template("rolegpt_describe_user")
                       .render({{"PERSON_NAME", profile.display_name}, {"BACKGROUND_INFO", background}}))};
  std::string generated = trim(client.chat(baseline.model, describe));

  // Step two: convert to second person.
  std::vector<ChatMessage> convert = {system_message(std::string(prompt_template("rolegpt_convert_system").text)),
                                      user_message(generated)};
  std::string converted = second_person(client.chat(baseline.model, convert));

  // Instruction and response generation: ten exemplar QA pairs.
  std::vector<ChatMessage> qa = {
      system_message(prompt_template("rolegpt_qa_system")
                         .render({{"PERSON_NAME", profile.display_name}, {"GENERATED_DESCRIPTION", generated}})),
      user_message(prompt_template("rolegpt_qa_user")
                       .render({{"PERSON_NAME", profile.display_name}, {"DESCRIPTION", generated}}))};
  std::vector<ExemplarPair> exemplars;
  for (int ask = 0; ask <= kMaxReasks; ++ask) {
    std::string reply = client.chat(baseline.model, qa);
    exemplars = parse_exemplars(reply);
    qa.push_back(assistant_message(reply));
    if (exemplars.size() >= kExemplarCount) break;
    if (ask == kMaxReasks) {
      throw Error(ErrorKind::kParseError, "RoleGPT exemplar generation for " + profile.person_id + " produced " +
                                              std::to_string(exemplars.size()) + " of 10 pairs after " +
                                              std::to_string(kMaxReasks) + " re-asks");
    }
    qa.push_back(user_message(std::string(prompt_template("rolegpt_qa_reask").text)));
  }
  exemplars.resize(kExemplarCount);

  std::string description = trim(converted.substr(kSecondPersonPrefix.size()));
  if (!description.empty() && description.back() == '.') description.pop_back();
  s.preamble.push_back(system_message(prompt_template("rolegpt_response_system")
                                          .render({{"PERSON_NAME", profile.display_name},
                                                   {"PERSON_DESCRIPTION", description}})));
  for (const auto& e : exemplars) {
    s.preamble.push_back(user_message(e.question));
    s.preamble.push_back(assistant_message(e.response));
  }
  s.exemplars = exemplars;
  s.artifacts["generated_description"] = generated;
  s.artifacts["second_person_description"] = converted;
  s.construction_transcript = describe;
  s.construction_transcript.push_back(assistant_message(generated));
  s.construction_transcript.insert(s.construction_transcript.end(), convert.begin(), convert.end());
  s.construction_transcript.push_back(assistant_message(converted));
  s.construction_transcript.insert(s.construction_transcript.end(), qa.begin(), qa.end());
  return s;
}

PersonaSession build_juliet_session(const BaselineSpec& baseline, const PersonProfile& profile) {
  PersonaSession s = new_session(baseline, profile, StrategyKind::kJuliet);
  s.preamble = {system_message(
      prompt_template("juliet_system").render({{"BACKGROUND_INFO", render_background(profile)}}))};
  return s;
}

PersonaSession build_gpts_session(const BaselineSpec& baseline, const PersonProfile& profile) {
  PersonaSession s = new_session(baseline, profile, StrategyKind::kGPTsBuilder);
  std::string stage_one = prompt_template("gpts_stage_one")
                              .render({{"PERSON_NAME", profile.display_name},
                                       {"BACKGROUND_INFO", render_background(profile)}});
  std::string instruction = trim(stage_one) + "\n\n" + std::string(prompt_template("gpts_stage_two").text);
  s.artifacts["instruction"] = instruction;
  s.preamble = {system_message(instruction)};
  return s;
}

PersonaSession build_session(ChatClient& client, const BaselineSpec& baseline, const PersonProfile& profile) {
  switch (baseline.strategy) {
    case StrategyKind::kRPP: return build_rpp_session(client, baseline, profile);
    case StrategyKind::kRoleGPT: return build_rolegpt_session(client, baseline, profile);
    case StrategyKind::kJuliet: return build_juliet_session(baseline, profile);
    case StrategyKind::kGPTsBuilder: return build_gpts_session(baseline, profile);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown strategy");
}

ResponseRecord answer_question(ChatClient& client, const PersonaSession& session, const Question& question,
                               const MisspellingDictionary& dictionary, std::int64_t created_at) {
  if (session.preamble.empty()) throw Error(ErrorKind::kInvalidArgument, "session has no preamble");
  if (question.status != QuestionStatus::kAccepted) {
    throw Error(ErrorKind::kPreconditionViolation, "question " + question.question_id + " is not accepted");
  }
  if (question.target_person && *question.target_person != session.person_id) {
    throw Error(ErrorKind::kPreconditionViolation,
                "question " + question.question_id + " targets " + *question.target_person);
  }
  std::vector<ChatMessage> messages = session.preamble;
  messages.push_back(user_message(question.text));
  std::string answer = client.chat(session.model, messages);
  return make_response(session.person_id, question.question_id, session.baseline_id, trim(answer), dictionary,
                       created_at);
}

}  // namespace roleeval
