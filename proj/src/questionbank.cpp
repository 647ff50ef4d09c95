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

#include "roleeval/questionbank.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "roleeval/error.hpp"
#include "roleeval/rng.hpp"
#include "roleeval/templates.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

using QC = QuestionCategory;

constexpr std::array<QuestionCategory, 10> kAll = {QC::kCR, QC::kED, QC::kLG, QC::kPH, QC::kPS,
                                                   QC::kIP, QC::kEM, QC::kFP, QC::kIS, QC::kIT};

constexpr int kMaxReasks = 2;

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

std::vector<Question> generate(ChatClient& client, const ModelSpec& model, QuestionCategory category,
                               int count, const PersonProfile* profile) {
  if (count < 1) throw Error(ErrorKind::kPreconditionViolation, "count must be at least 1");
  std::map<std::string, std::string> values = {
      {"COUNT", std::to_string(count)},
      {"CATEGORY_NAME", std::string(display_name(category))},
      {"CATEGORY_DEFINITION", category_definition(category)}};
  std::string prompt;
  if (profile != nullptr) {
    values["BACKGROUND_INFO"] = render_background(*profile);
    prompt = prompt_template("question_gen_specific").render(values);
  } else {
    prompt = prompt_template("question_gen_general").render(values);
  }

  std::vector<ChatMessage> messages = {user_message(prompt)};
  for (int ask = 0; ask <= kMaxReasks; ++ask) {
    std::string reply = client.chat(model, messages);
    std::vector<std::string> lines = parse_numbered_lines(reply);
    // Duplicate lines would collide on question_id.
    std::vector<std::string> unique;
    for (auto& l : lines) {
      if (std::find(unique.begin(), unique.end(), l) == unique.end()) unique.push_back(std::move(l));
    }
    if (static_cast<int>(unique.size()) >= count) {
      std::vector<Question> out;
      for (int i = 0; i < count; ++i) {
        Question q;
        q.category = category;
        q.text = unique[i];
        if (profile != nullptr) {
          q.target_person = profile->person_id;
          q.question_id = short_id(profile->person_id + "-" + std::string(code_of(category)),
                                   {unique[i]}, 10);
        } else {
          q.question_id = short_id(code_of(category), {unique[i]}, 10);
        }
        out.push_back(std::move(q));
      }
      return out;
    }
    if (ask == kMaxReasks) {
      throw Error(ErrorKind::kParseError,
                  "expected " + std::to_string(count) + " questions for " + std::string(code_of(category)) +
                      ", got " + std::to_string(unique.size()) + " after " + std::to_string(kMaxReasks) +
                      " re-asks");
    }
    messages.push_back(assistant_message(reply));
    messages.push_back(
        user_message(prompt_template("question_gen_reask").render({{"COUNT", std::to_string(count)}})));
  }
  return {};
}

}  // namespace

std::span<const QuestionCategory> all_question_categories() { return kAll; }

QuestionScope scope_of(QuestionCategory category) {
  return static_cast<int>(category) < 5 ? QuestionScope::kGeneral : QuestionScope::kSpecific;
}

std::string_view code_of(QuestionCategory category) {
  static constexpr std::array<std::string_view, 10> kCodes = {"CR", "ED", "LG", "PH", "PS",
                                                              "IP", "EM", "FP", "IS", "IT"};
  return kCodes[static_cast<std::size_t>(category)];
}

std::string_view display_name(QuestionCategory category) {
  static constexpr std::array<std::string_view, 10> kNames = {
      "Creativity",        "Ethical Dilemmas", "Logical",           "Philosophical", "Problem Solving",
      "In-Depth Personal", "Emotional",        "Future Prediction", "Insightful",    "Interest"};
  return kNames[static_cast<std::size_t>(category)];
}

std::string category_definition(QuestionCategory category) {
  static const nlohmann::json definitions =
      nlohmann::json::parse(prompt_template("question_categories").text);
  return definitions.at(std::string(code_of(category))).get<std::string>();
}

QuestionCategory question_category_from_code(std::string_view code) {
  for (auto c : kAll) {
    if (code_of(c) == code) return c;
  }
  throw Error(ErrorKind::kParseError, "unknown question category '" + std::string(code) + "'");
}

std::string_view status_name(QuestionStatus status) {
  switch (status) {
    case QuestionStatus::kCandidate: return "candidate";
    case QuestionStatus::kAccepted: return "accepted";
    case QuestionStatus::kExcluded: return "excluded";
  }
  return "candidate";
}

QuestionStatus status_from_name(std::string_view name) {
  if (name == "candidate") return QuestionStatus::kCandidate;
  if (name == "accepted") return QuestionStatus::kAccepted;
  if (name == "excluded") return QuestionStatus::kExcluded;
  throw Error(ErrorKind::kParseError, "unknown question status '" + std::string(name) + "'");
}

void validate_question(const Question& q) {
  if (is_blank(q.question_id)) throw Error(ErrorKind::kInvalidArgument, "question_id is empty");
  if (is_blank(q.text)) throw Error(ErrorKind::kInvalidArgument, "question " + q.question_id + " has no text");
  bool specific = scope_of(q.category) == QuestionScope::kSpecific;
  if (specific && !q.target_person) {
    throw Error(ErrorKind::kInvalidArgument, "specific question " + q.question_id + " has no target_person");
  }
  if (!specific && q.target_person) {
    throw Error(ErrorKind::kInvalidArgument, "general question " + q.question_id + " has a target_person");
  }
  if (q.status == QuestionStatus::kExcluded && !q.exclusion_reason) {
    throw Error(ErrorKind::kInvalidArgument, "excluded question " + q.question_id + " has no reason");
  }
}

const Question& Exam::question(std::string_view question_id) const {
  for (const auto& q : questions) {
    if (q.question_id == question_id) return q;
  }
  throw Error(ErrorKind::kUnknownQuestion,
              "question '" + std::string(question_id) + "' is not in exam " + exam_id,
              {std::string(question_id)});
}

bool Exam::contains(std::string_view question_id) const {
  return std::any_of(questions.begin(), questions.end(),
                     [&](const auto& q) { return q.question_id == question_id; });
}

void validate_exam(const Exam& exam) {
  if (exam.questions.size() != kAll.size()) {
    throw Error(ErrorKind::kInvalidArgument, "exam " + exam.exam_id + " must hold 10 questions");
  }
  std::set<std::string> ids;
  std::set<QuestionCategory> categories;
  int general = 0;
  for (const auto& q : exam.questions) {
    validate_question(q);
    if (!ids.insert(q.question_id).second) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate question " + q.question_id);
    }
    categories.insert(q.category);
    if (scope_of(q.category) == QuestionScope::kGeneral) {
      ++general;
    } else if (q.target_person != exam.person_id) {
      throw Error(ErrorKind::kInvalidArgument, "question " + q.question_id + " targets another person");
    }
  }
  if (general != 5 || categories.size() != kAll.size()) {
    throw Error(ErrorKind::kInvalidArgument, "exam " + exam.exam_id + " must cover each category once");
  }
}

nlohmann::json to_json(const Question& q) {
  nlohmann::json j = {{"question_id", q.question_id},
                      {"category", code_of(q.category)},
                      {"scope", scope_of(q.category) == QuestionScope::kGeneral ? "general" : "specific"},
                      {"text", q.text},
                      {"status", status_name(q.status)}};
  if (q.target_person) j["target_person"] = *q.target_person;
  if (q.exclusion_reason) j["exclusion_reason"] = *q.exclusion_reason;
  return j;
}

Question question_from_json(const nlohmann::json& j) {
  try {
    Question q;
    q.question_id = j.at("question_id").get<std::string>();
    q.category = question_category_from_code(j.at("category").get<std::string>());
    q.text = j.at("text").get<std::string>();
    q.status = status_from_name(j.value("status", "candidate"));
    if (j.contains("target_person") && !j["target_person"].is_null()) {
      q.target_person = j["target_person"].get<std::string>();
    }
    if (j.contains("exclusion_reason") && !j["exclusion_reason"].is_null()) {
      q.exclusion_reason = j["exclusion_reason"].get<std::string>();
    }
    validate_question(q);
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed question: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParseError) throw;
    throw Error(ErrorKind::kParseError, e.what());
  }
}

nlohmann::json to_json(const Exam& exam) {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : exam.questions) qs.push_back(to_json(q));
  return {{"exam_id", exam.exam_id}, {"person_id", exam.person_id}, {"seed", exam.seed}, {"questions", qs}};
}

Exam exam_from_json(const nlohmann::json& j) {
  Exam exam;
  try {
    exam.exam_id = j.at("exam_id").get<std::string>();
    exam.person_id = j.at("person_id").get<std::string>();
    exam.seed = j.value("seed", std::uint64_t{0});
    for (const auto& jq : j.at("questions")) exam.questions.push_back(question_from_json(jq));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed exam: ") + e.what());
  }
  validate_exam(exam);
  return exam;
}

std::vector<Question> load_question_pool(const std::filesystem::path& path) {
  nlohmann::json doc = read_json_file(path);
  if (!doc.is_array()) throw Error(ErrorKind::kParseError, path.string() + " must hold a JSON array");
  std::vector<Question> pool;
  for (const auto& j : doc) pool.push_back(question_from_json(j));
  return pool;
}

void save_question_pool(const std::filesystem::path& path, std::span<const Question> pool) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& q : pool) doc.push_back(to_json(q));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<std::string> parse_numbered_lines(std::string_view text) {
  static const std::regex kLine(R"(^\s*(?:Q(?:uestion)?\s*)?(\d+)\s*[.):]\s*(.+?)\s*$)");
  std::vector<std::string> out;
  for (const auto& line : split_lines(text)) {
    std::smatch m;
    if (std::regex_match(line, m, kLine)) {
      std::string body = trim(m[2].str());
      if (!body.empty()) out.push_back(body);
    }
  }
  return out;
}

std::vector<Question> generate_general_questions(ChatClient& client, const ModelSpec& model,
                                                 QuestionCategory category, int count) {
  if (scope_of(category) != QuestionScope::kGeneral) {
    throw Error(ErrorKind::kPreconditionViolation,
                std::string(code_of(category)) + " is a specific category; use generate_specific_questions");
  }
  return generate(client, model, category, count, nullptr);
}

std::vector<Question> generate_specific_questions(ChatClient& client, const ModelSpec& model,
                                                  const PersonProfile& profile,
                                                  QuestionCategory category, int count) {
  if (scope_of(category) != QuestionScope::kSpecific) {
    throw Error(ErrorKind::kPreconditionViolation,
                std::string(code_of(category)) + " is a general category; use generate_general_questions");
  }
  return generate(client, model, category, count, &profile);
}

FilterConfig FilterConfig::from_json(const nlohmann::json& j) {
  FilterConfig config;
  try {
    if (j.contains("specialist_terms")) {
      config.specialist_terms = j["specialist_terms"].get<std::vector<std::string>>();
    }
    config.max_words = j.value("max_words", config.max_words);
    if (j.contains("overrides")) {
      for (const auto& [id, value] : j["overrides"].items()) {
        FilterOverride o;
        if (value.is_string()) {
          o.status = status_from_name(value.get<std::string>());
        } else {
          o.status = status_from_name(value.at("status").get<std::string>());
          o.reason = value.value("reason", std::string(kOverrideReason));
        }
        if (o.status == QuestionStatus::kCandidate) {
          throw Error(ErrorKind::kConfigError, "override for " + id + " must accept or exclude");
        }
        config.overrides[id] = o;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, std::string("malformed filter config: ") + e.what());
  }
  return config;
}

FilterConfig FilterConfig::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

std::vector<Question> filter_questions(std::vector<Question> candidates, const FilterConfig& ruleset) {
  for (auto& q : candidates) {
    q.status = QuestionStatus::kAccepted;
    q.exclusion_reason.reset();
    for (const auto& term : ruleset.specialist_terms) {
      if (!is_blank(term) && contains_icase(q.text, trim(term))) {
        q.status = QuestionStatus::kExcluded;
        q.exclusion_reason = std::string(kJargonReason);
        break;
      }
    }
    if (q.status == QuestionStatus::kAccepted && word_count(q.text) > ruleset.max_words) {
      q.status = QuestionStatus::kExcluded;
      q.exclusion_reason = std::string(kLengthReason);
    }
    if (auto it = ruleset.overrides.find(q.question_id); it != ruleset.overrides.end()) {
      q.status = it->second.status;
      if (q.status == QuestionStatus::kExcluded) {
        q.exclusion_reason = it->second.reason.empty() ? std::string(kOverrideReason) : it->second.reason;
      } else {
        q.exclusion_reason.reset();
      }
    }
  }
  return candidates;
}

Exam assemble_exam(std::string_view person_id, std::span<const Question> pool, std::uint64_t seed) {
  std::map<QuestionCategory, std::vector<const Question*>> by_category;
  for (const auto& q : pool) {
    if (q.status != QuestionStatus::kAccepted) continue;
    bool specific = scope_of(q.category) == QuestionScope::kSpecific;
    if (specific ? q.target_person != person_id : q.target_person.has_value()) continue;
    by_category[q.category].push_back(&q);
  }

  std::vector<std::string> empty;
  for (auto c : kAll) {
    if (by_category[c].empty()) empty.emplace_back(code_of(c));
  }
  if (!empty.empty()) {
    std::string names;
    for (const auto& e : empty) names += (names.empty() ? "" : ", ") + e;
    throw Error(ErrorKind::kInsufficientPool,
                "no accepted questions for " + std::string(person_id) + " in: " + names, empty);
  }

  SeededRng rng(derive_seed(seed, "exam:" + std::string(person_id)));
  Exam exam;
  exam.person_id = std::string(person_id);
  exam.seed = seed;
  exam.exam_id = std::string(person_id) + "-exam-" + std::to_string(seed);
  for (auto c : kAll) {
    auto& candidates = by_category[c];
    std::sort(candidates.begin(), candidates.end(),
              [](const Question* a, const Question* b) { return a->question_id < b->question_id; });
    exam.questions.push_back(*candidates[rng.uniform_index(candidates.size())]);
  }
  rng.shuffle(std::span<Question>(exam.questions));
  validate_exam(exam);
  return exam;
}

}  // namespace roleeval
