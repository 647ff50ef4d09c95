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

#include "roleeval/judge.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>

#include "roleeval/error.hpp"
#include "roleeval/rng.hpp"
#include "roleeval/templates.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

constexpr int kMaxReasks = 2;

struct ParseAttempt {
  std::optional<std::vector<int>> selections;
  std::string problem;
};

using Entries = std::vector<std::pair<std::size_t, int>>;  // (question, slot)

ParseAttempt resolve(const Entries& entries, std::size_t count) {
  std::vector<int> slots(count, -1);
  for (auto [question, slot] : entries) {
    if (question >= count) continue;
    if (slots[question] != -1 && slots[question] != slot) {
      return {std::nullopt, "contradictory selections for question " + std::to_string(question)};
    }
    slots[question] = slot;
  }
  std::string missing;
  for (std::size_t i = 0; i < count; ++i) {
    if (slots[i] == -1) missing += (missing.empty() ? "" : ", ") + std::to_string(i);
  }
  if (!missing.empty()) return {std::nullopt, "incomplete selections, missing questions " + missing};
  return {slots, ""};
}

std::optional<Entries> selection_block(std::string_view text) {
  std::string lowered = to_lower_ascii(text);
  std::size_t marker = lowered.rfind("selections:");
  if (marker == std::string::npos) return std::nullopt;
  static const std::regex kAnswerToken(R"(Answer\s*([01])\s*-\s*(\d+))", std::regex::icase);
  static const std::regex kIndexed(R"(^\s*(?:Question\s*)?(\d+)\s*(?::|=|->|-)\s*(?:Answer\s*)?([01])\s*$)",
                                   std::regex::icase);
  Entries entries;
  for (const auto& raw : split_lines(text.substr(marker + 11))) {
    std::string line = trim(raw);
    std::smatch m;
    if (std::regex_search(line, m, kAnswerToken)) {
      std::size_t question = std::stoul(m[2].str());
      static const std::regex kLead(R"(^\s*(?:Question\s*)?(\d+)\s*:)", std::regex::icase);
      std::smatch lead;
      // "Question 3: Answer1-4" names two different questions.
      if (std::regex_search(line, lead, kLead) && std::stoul(lead[1].str()) != question) {
        entries.push_back({std::stoul(lead[1].str()), 0});
        entries.push_back({std::stoul(lead[1].str()), 1});
        continue;
      }
      entries.push_back({question, std::stoi(m[1].str())});
    } else if (std::regex_match(line, m, kIndexed)) {
      entries.push_back({std::stoul(m[1].str()), std::stoi(m[2].str())});
    }
  }
  return entries;
}

Entries answer_tokens(std::string_view text) {
  static const std::regex kToken(R"(Answer\s*([01])\s*-\s*(\d+))", std::regex::icase);
  Entries entries;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kToken); it != std::sregex_iterator(); ++it) {
    entries.push_back({std::stoul((*it)[2].str()), std::stoi((*it)[1].str())});
  }
  return entries;
}

std::size_t length_of(std::string_view answer) { return utf8_length(answer); }

}  // namespace

std::string_view mode_name(JudgeMode mode) {
  return mode == JudgeMode::kIdentifyHuman ? "identify_human" : "identify_nonhuman";
}

JudgeMode mode_from_name(std::string_view name) {
  std::string n = to_lower_ascii(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "identify_human" || n == "human") return JudgeMode::kIdentifyHuman;
  if (n == "identify_nonhuman" || n == "nonhuman" || n == "identify_non_human") return JudgeMode::kIdentifyNonhuman;
  throw Error(ErrorKind::kInvalidArgument, "unknown judge mode '" + std::string(name) + "'");
}

void JudgeRunConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::kInvalidArgument, "iterations must be at least 1");
  if (l_questions < 1) throw Error(ErrorKind::kInvalidArgument, "l_questions must be at least 1");
  if (m_baselines < 1) throw Error(ErrorKind::kInvalidArgument, "m_baselines must be at least 1");
  if (n_persons < 1) throw Error(ErrorKind::kInvalidArgument, "n_persons must be at least 1");
  judge_model.validate();
}

std::vector<JudgeForm> build_judge_forms(const ResponseStore& store, const Exam& exam,
                                         std::span<const std::string> baselines, std::uint64_t seed) {
  if (baselines.empty()) throw Error(ErrorKind::kInvalidArgument, "no baselines to judge");
  SeededRng rng(derive_seed(seed, "forms:" + exam.person_id));
  std::vector<JudgeItem> items;
  for (const auto& baseline : baselines) {
    for (const auto& q : exam.questions) {
      const ResponseRecord* human = store.find(exam.person_id, q.question_id, kHumanSource);
      if (human == nullptr) {
        throw Error(ErrorKind::kMissingResponse, "no human answer to " + q.question_id,
                    {q.question_id, std::string(kHumanSource)});
      }
      const ResponseRecord* machine = store.find(exam.person_id, q.question_id, baseline);
      if (machine == nullptr) {
        throw Error(ErrorKind::kMissingResponse, "no " + baseline + " answer to " + q.question_id,
                    {q.question_id, baseline});
      }
      JudgeItem item;
      item.question_id = q.question_id;
      item.category = q.category;
      item.question_text = q.text;
      item.baseline_id = baseline;
      item.truth_slot = rng.coin();
      item.answer0 = item.truth_slot == 0 ? human->normalized : machine->normalized;
      item.answer1 = item.truth_slot == 0 ? machine->normalized : human->normalized;
      items.push_back(std::move(item));
    }
  }
  rng.shuffle(std::span<JudgeItem>(items));

  const std::size_t per_form = exam.questions.size();
  std::vector<JudgeForm> forms;
  for (std::size_t f = 0; f < baselines.size(); ++f) {
    JudgeForm form;
    form.person_id = exam.person_id;
    form.form_id = exam.person_id + "-form-" + std::to_string(f);
    form.items.assign(items.begin() + static_cast<std::ptrdiff_t>(f * per_form),
                      items.begin() + static_cast<std::ptrdiff_t>((f + 1) * per_form));
    forms.push_back(std::move(form));
  }
  return forms;
}

std::string judge_system_prompt(JudgeMode mode, std::size_t question_count) {
  const char* name = mode == JudgeMode::kIdentifyHuman ? "judge_system_human" : "judge_system_nonhuman";
  return prompt_template(name).render(
      {{"COUNT_WORD", count_word(question_count)}, {"LAST_INDEX", std::to_string(question_count - 1)}});
}

std::string judge_user_prompt(const JudgeForm& form, std::string_view background, JudgeMode mode) {
  std::string out;
  for (std::size_t i = 0; i < form.items.size(); ++i) {
    const auto& item = form.items[i];
    const std::string idx = std::to_string(i);
    out += "Question " + idx + ": " + item.question_text + "\n\n";
    out += "Answer0-" + idx + ": " + item.answer0 + "\n\n";
    out += "Answer1-" + idx + ": " + item.answer1 + "\n\n";
  }
  out += "The provided background information about the human, the answers are answered from the human:\n\n";
  out += trim(background) + "\n\n";
  out += prompt_template("judge_format")
             .render({{"LAST_INDEX", std::to_string(form.items.size() - 1)},
                      {"TARGET", mode == JudgeMode::kIdentifyHuman ? "human" : "LLM-generated"}});
  return out;
}

std::vector<int> parse_judge_output(std::string_view text, std::size_t question_count) {
  if (question_count == 0) return {};
  std::string problem;
  if (auto block = selection_block(text)) {
    ParseAttempt primary = resolve(*block, question_count);
    if (primary.selections) return *primary.selections;
    problem = primary.problem;
  }
  ParseAttempt fallback = resolve(answer_tokens(text), question_count);
  if (fallback.selections) return *fallback.selections;
  throw Error(ErrorKind::kJudgeParseError, problem.empty() ? fallback.problem : problem);
}

JudgeRunResult run_judge(ChatClient& client, const JudgeRunConfig& config, const JudgeForm& form,
                         std::string_view background) {
  config.validate();
  if (form.items.empty()) throw Error(ErrorKind::kInvalidArgument, "form " + form.form_id + " is empty");
  for (const auto& item : form.items) {
    if (item.truth_slot != 0 && item.truth_slot != 1) {
      throw Error(ErrorKind::kInvalidArgument, "form " + form.form_id + " has an invalid truth slot");
    }
  }
  const std::size_t count = form.items.size();
  const std::vector<ChatMessage> prompt = {system_message(judge_system_prompt(config.mode, count)),
                                           user_message(judge_user_prompt(form, background, config.mode))};
  const std::string reask =
      prompt_template("judge_reask").render({{"LAST_INDEX", std::to_string(count - 1)}});

  JudgeRunResult result;
  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    std::vector<ChatMessage> messages = prompt;
    std::string last_problem;
    bool parsed = false;
    for (int ask = 0; ask <= kMaxReasks && !parsed; ++ask) {
      std::string reply = client.chat(config.judge_model, messages, iteration - 1);
      try {
        result.verdicts.push_back({form.form_id, iteration, parse_judge_output(reply, count), config.mode});
        parsed = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kJudgeParseError) throw;
        last_problem = e.what();
        messages.push_back(assistant_message(reply));
        messages.push_back(user_message(reask));
      }
    }
    if (!parsed) {
      ++result.failed_iterations;
      result.failures.push_back(form.form_id + " iteration " + std::to_string(iteration) + ": " + last_problem);
    }
  }
  if (result.verdicts.empty()) {
    throw Error(ErrorKind::kJudgeParseError,
                "every iteration for " + form.form_id + " failed to parse; last: " + result.failures.back());
  }
  return result;
}

int control_model_select(const JudgeItem& item, JudgeMode /*mode*/) {
  return length_of(item.answer1) > length_of(item.answer0) ? 1 : 0;
}

JudgeVerdictSet run_control(const JudgeForm& form, JudgeMode mode) {
  JudgeVerdictSet v{form.form_id, 1, {}, mode};
  for (const auto& item : form.items) v.selections.push_back(control_model_select(item, mode));
  return v;
}

std::size_t count_deceptions(const JudgeForm& form, const JudgeVerdictSet& verdicts) {
  if (verdicts.selections.size() != form.items.size()) {
    throw Error(ErrorKind::kInvalidArgument, "verdict set does not match form " + form.form_id);
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < form.items.size(); ++i) {
    if (is_deception(verdicts.selections[i], form.items[i].truth_slot, verdicts.mode)) ++n;
  }
  return n;
}

nlohmann::json verdict_log_record(const JudgeForm& form, const JudgeVerdictSet& verdicts, std::string_view judge) {
  if (verdicts.selections.size() != form.items.size()) {
    throw Error(ErrorKind::kInvalidArgument, "verdict set does not match form " + form.form_id);
  }
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < form.items.size(); ++i) {
    const auto& item = form.items[i];
    items.push_back({{"question_id", item.question_id},
                     {"category", code_of(item.category)},
                     {"baseline_id", item.baseline_id},
                     {"truth_slot", item.truth_slot},
                     {"selection", verdicts.selections[i]}});
  }
  return {{"form_id", form.form_id}, {"person_id", form.person_id}, {"judge", judge},
          {"mode", mode_name(verdicts.mode)}, {"iteration", verdicts.iteration}, {"items", items}};
}

nlohmann::json to_json(const JudgeForm& form) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : form.items) {
    items.push_back({{"question_id", item.question_id}, {"category", code_of(item.category)},
                     {"question_text", item.question_text}, {"answer0", item.answer0},
                     {"answer1", item.answer1}, {"truth_slot", item.truth_slot},
                     {"baseline_id", item.baseline_id}});
  }
  return {{"form_id", form.form_id}, {"person_id", form.person_id}, {"items", items}};
}

JudgeForm form_from_json(const nlohmann::json& j) {
  try {
    JudgeForm form;
    form.form_id = j.at("form_id").get<std::string>();
    form.person_id = j.at("person_id").get<std::string>();
    for (const auto& ji : j.at("items")) {
      JudgeItem item;
      item.question_id = ji.at("question_id").get<std::string>();
      item.category = question_category_from_code(ji.at("category").get<std::string>());
      item.question_text = ji.at("question_text").get<std::string>();
      item.answer0 = ji.at("answer0").get<std::string>();
      item.answer1 = ji.at("answer1").get<std::string>();
      item.truth_slot = ji.at("truth_slot").get<int>();
      item.baseline_id = ji.at("baseline_id").get<std::string>();
      form.items.push_back(std::move(item));
    }
    return form;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed form: ") + e.what());
  }
}

}  // namespace roleeval
