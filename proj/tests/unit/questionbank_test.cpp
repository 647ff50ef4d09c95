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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <map>
#include <mutex>
#include <set>

#include "roleeval/error.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/questionbank.hpp"
#include "test_support.hpp"

namespace roleeval {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

ModelSpec fn_spec() {
  ModelSpec s;
  s.provider_id = "fn";
  s.model_id = "gpt-4";
  s.temperature = 0.7;
  return s;
}

std::string numbered(int n, const std::string& stem = "Question") {
  std::string out;
  for (int i = 1; i <= n; ++i) out += std::to_string(i) + ". " + stem + " " + std::to_string(i) + "?\n";
  return out;
}

struct Recorder {
  std::mutex mutex;
  std::vector<ChatRequest> requests;
};

std::shared_ptr<FunctionProvider> recording(Recorder& rec, std::function<std::string(const ChatRequest&)> f) {
  return std::make_shared<FunctionProvider>([&rec, f](const ChatRequest& r) {
    std::lock_guard lock(rec.mutex);
    rec.requests.push_back(r);
    return f(r);
  });
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(ParseNumberedLines, AcceptsDotsAndParens) {
  EXPECT_THAT(parse_numbered_lines("Sure!\n1. First?\n2) Second?\n  3. Third?\nThanks"),
              ElementsAre("First?", "Second?", "Third?"));
  EXPECT_TRUE(parse_numbered_lines("no numbers here").empty());
}

TEST(Categories, CodesScopesAndOrder) {
  std::vector<std::string> codes;
  for (auto c : all_question_categories()) codes.emplace_back(code_of(c));
  EXPECT_THAT(codes, ElementsAre("CR", "ED", "LG", "PH", "PS", "IP", "EM", "FP", "IS", "IT"));
  EXPECT_EQ(scope_of(QuestionCategory::kPS), QuestionScope::kGeneral);
  EXPECT_EQ(scope_of(QuestionCategory::kIP), QuestionScope::kSpecific);
  EXPECT_EQ(question_category_from_code("IT"), QuestionCategory::kIT);
  EXPECT_EQ(kind_of([] { question_category_from_code("XX"); }), ErrorKind::kParseError);
  EXPECT_EQ(display_name(QuestionCategory::kED), "Ethical Dilemmas");
}

TEST(GenerateQuestions, FiveLinesGiveFiveCandidates) {
  Recorder rec;
  ChatClient client;
  client.register_provider("fn", recording(rec, [](const ChatRequest&) { return numbered(5); }));
  auto qs = generate_general_questions(client, fn_spec(), QuestionCategory::kCR, 5);
  ASSERT_EQ(qs.size(), 5u);
  for (const auto& q : qs) {
    EXPECT_EQ(q.status, QuestionStatus::kCandidate);
    EXPECT_EQ(q.category, QuestionCategory::kCR);
    EXPECT_FALSE(q.target_person.has_value());
    EXPECT_NO_THROW(validate_question(q));
  }
  EXPECT_EQ(qs[0].text, "Question 1?");
  ASSERT_EQ(rec.requests.size(), 1u);
  EXPECT_THAT(rec.requests[0].messages[0].content, HasSubstr("Write 5 questions"));
}

TEST(GenerateQuestions, ShortReplyIsReaskedThenFails) {
  Recorder rec;
  ChatClient client;
  client.register_provider("fn", recording(rec, [](const ChatRequest&) { return numbered(3); }));
  EXPECT_EQ(kind_of([&] { generate_general_questions(client, fn_spec(), QuestionCategory::kLG, 5); }),
            ErrorKind::kParseError);
  ASSERT_EQ(rec.requests.size(), 3u);
  EXPECT_EQ(rec.requests[2].messages.size(), 5u);
  EXPECT_THAT(rec.requests[1].messages.back().content, HasSubstr("did not contain 5 numbered questions"));
}

TEST(GenerateQuestions, ReaskRecovers) {
  Recorder rec;
  ChatClient client;
  client.register_provider("fn", recording(rec, [](const ChatRequest& r) {
                             return r.messages.size() == 1 ? numbered(2) : numbered(4);
                           }));
  auto qs = generate_general_questions(client, fn_spec(), QuestionCategory::kPH, 4);
  EXPECT_EQ(qs.size(), 4u);
  EXPECT_EQ(rec.requests.size(), 2u);
}

TEST(GenerateQuestions, ScopeGuards) {
  ChatClient client;
  client.register_provider("fn", std::make_shared<FunctionProvider>([](const ChatRequest&) { return numbered(4); }));
  auto profile = testing::fixture_profiles().front();
  EXPECT_EQ(kind_of([&] { generate_general_questions(client, fn_spec(), QuestionCategory::kIP, 4); }),
            ErrorKind::kPreconditionViolation);
  EXPECT_EQ(kind_of([&] { generate_specific_questions(client, fn_spec(), profile, QuestionCategory::kCR, 4); }),
            ErrorKind::kPreconditionViolation);
  EXPECT_EQ(kind_of([&] { generate_general_questions(client, fn_spec(), QuestionCategory::kCR, 0); }),
            ErrorKind::kPreconditionViolation);
}

TEST(GenerateQuestions, SpecificPromptsDifferPerProfile) {
  Recorder rec;
  ClientOptions options;
  options.record_transcripts = true;
  ChatClient client(options);
  client.register_provider("fn", recording(rec, [](const ChatRequest&) { return numbered(4); }));
  auto profiles = testing::fixture_profiles();
  auto a = generate_specific_questions(client, fn_spec(), profiles[0], QuestionCategory::kEM, 4);
  auto b = generate_specific_questions(client, fn_spec(), profiles[1], QuestionCategory::kEM, 4);
  ASSERT_EQ(rec.requests.size(), 2u);
  EXPECT_NE(CacheKey::of(rec.requests[0]), CacheKey::of(rec.requests[1]));
  EXPECT_THAT(rec.requests[0].messages[0].content, HasSubstr(render_background(profiles[0])));
  EXPECT_EQ(a[0].target_person, profiles[0].person_id);
  EXPECT_EQ(b[0].target_person, profiles[1].person_id);
  EXPECT_NE(a[0].question_id, b[0].question_id);
}

Question candidate(std::string id, std::string text) {
  Question q;
  q.question_id = std::move(id);
  q.category = QuestionCategory::kIS;
  q.text = std::move(text);
  q.target_person = "p00";
  return q;
}

TEST(FilterQuestions, JargonLengthAndOverride) {
  FilterConfig rules = FilterConfig::from_json(
      {{"specialist_terms", {"gut microbiota"}}, {"max_words", 60}, {"overrides", nlohmann::json::object()}});
  std::string long_text;
  for (int i = 0; i < 61; ++i) long_text += "word ";
  auto out = filter_questions({candidate("a", "How does the Gut Microbiota affect your mood?"),
                               candidate("b", "What did you learn from the hardest year of your career?"),
                               candidate("c", long_text)},
                              rules);
  EXPECT_EQ(out[0].status, QuestionStatus::kExcluded);
  EXPECT_EQ(out[0].exclusion_reason, std::string(kJargonReason));
  EXPECT_EQ(out[1].status, QuestionStatus::kAccepted);
  EXPECT_FALSE(out[1].exclusion_reason.has_value());
  EXPECT_EQ(out[2].exclusion_reason, std::string(kLengthReason));

  rules.overrides["a"] = FilterOverride{QuestionStatus::kAccepted, ""};
  rules.overrides["b"] = FilterOverride{QuestionStatus::kExcluded, ""};
  out = filter_questions(out, rules);
  EXPECT_EQ(out[0].status, QuestionStatus::kAccepted);
  EXPECT_FALSE(out[0].exclusion_reason.has_value());
  EXPECT_EQ(out[1].status, QuestionStatus::kExcluded);
  EXPECT_EQ(out[1].exclusion_reason, std::string(kOverrideReason));
  for (const auto& q : out) EXPECT_NO_THROW(validate_question(q));
}

TEST(AssembleExam, OnePerCategoryForcedWhenSingleton) {
  auto profiles = testing::fixture_profiles();
  auto pool = testing::fixture_pool(profiles);
  // Keep one accepted candidate per category for p00.
  std::map<QuestionCategory, int> kept;
  for (auto& q : pool) {
    bool mine = !q.target_person || *q.target_person == "p00";
    if (mine && kept[q.category]++ > 0) {
      q.status = QuestionStatus::kExcluded;
      q.exclusion_reason = "test";
    }
  }
  Exam exam = assemble_exam("p00", pool, 7);
  ASSERT_EQ(exam.questions.size(), 10u);
  std::set<QuestionCategory> cats;
  for (const auto& q : exam.questions) {
    cats.insert(q.category);
    EXPECT_EQ(q.status, QuestionStatus::kAccepted);
    if (scope_of(q.category) == QuestionScope::kSpecific) EXPECT_EQ(q.target_person, "p00");
  }
  EXPECT_EQ(cats.size(), 10u);
  EXPECT_NO_THROW(validate_exam(exam));
}

TEST(AssembleExam, DeterministicPerSeed) {
  auto profiles = testing::fixture_profiles();
  auto pool = testing::fixture_pool(profiles);
  Exam a = assemble_exam("p03", pool, 99);
  Exam b = assemble_exam("p03", pool, 99);
  EXPECT_EQ(to_json(a), to_json(b));
  bool any_diff = false;
  for (std::uint64_t s = 100; s < 110 && !any_diff; ++s) {
    any_diff = to_json(assemble_exam("p03", pool, s)) != to_json(a);
  }
  EXPECT_TRUE(any_diff);
}

TEST(AssembleExam, MissingCategoryIsNamed) {
  auto profiles = testing::fixture_profiles();
  auto pool = testing::fixture_pool(profiles);
  std::erase_if(pool, [](const Question& q) { return q.category == QuestionCategory::kED; });
  try {
    assemble_exam("p00", pool, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientPool);
    EXPECT_THAT(e.details(), ElementsAre("ED"));
  }
}

TEST(AssembleExam, SelectionIsRoughlyUniform) {
  auto profiles = testing::fixture_profiles();
  auto pool = testing::fixture_pool(profiles);
  std::map<std::string, int> counts;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& q : assemble_exam("p01", pool, static_cast<std::uint64_t>(s)).questions) {
      if (q.category == QuestionCategory::kCR) ++counts[q.question_id];
    }
  }
  ASSERT_EQ(counts.size(), 2u);
  // Binomial(10000, 0.5): 4 standard errors is 200.
  for (const auto& [id, n] : counts) EXPECT_NEAR(n, trials / 2, 200) << id;
}

TEST(QuestionJson, RoundTrip) {
  auto pool = testing::fixture_pool(testing::fixture_profiles());
  testing::TempDir dir;
  save_question_pool(dir / "q.json", pool);
  EXPECT_EQ(load_question_pool(dir / "q.json"), pool);
  Exam exam = assemble_exam("p02", pool, 3);
  Exam back = exam_from_json(to_json(exam));
  EXPECT_EQ(back.questions, exam.questions);
  EXPECT_EQ(back.exam_id, exam.exam_id);
}

}  // namespace
}  // namespace roleeval
