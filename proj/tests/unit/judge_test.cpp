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
#include "roleeval/judge.hpp"
#include "test_support.hpp"

namespace roleeval {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string selections_block(const std::vector<int>& picks) {
  std::string out = "Some reasoning first.\nSELECTIONS:\n";
  for (std::size_t i = 0; i < picks.size(); ++i) {
    out += "Question " + std::to_string(i) + ": Answer" + std::to_string(picks[i]) + "-" + std::to_string(i) + "\n";
  }
  return out;
}

JudgeRunConfig config(int iterations = 3, JudgeMode mode = JudgeMode::kIdentifyHuman) {
  JudgeRunConfig c;
  c.iterations = iterations;
  c.mode = mode;
  c.judge_model.provider_id = "fn";
  c.judge_model.model_id = "judge";
  return c;
}

TEST(JudgeForms, PartitionCoversEveryPairOnce) {
  auto cohort = testing::make_cohort(1, 7, 3);
  const Exam& exam = cohort.exams[0];
  auto forms = build_judge_forms(cohort.store, exam, cohort.baselines, 9);
  ASSERT_EQ(forms.size(), 7u);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& f : forms) {
    EXPECT_EQ(f.items.size(), 10u);
    EXPECT_EQ(f.person_id, exam.person_id);
    for (const auto& item : f.items) {
      EXPECT_TRUE(seen.insert({item.baseline_id, item.question_id}).second);
      const auto* human = cohort.store.find(exam.person_id, item.question_id, "human");
      const auto* machine = cohort.store.find(exam.person_id, item.question_id, item.baseline_id);
      EXPECT_EQ(item.truth_slot == 0 ? item.answer0 : item.answer1, human->normalized);
      EXPECT_EQ(item.truth_slot == 0 ? item.answer1 : item.answer0, machine->normalized);
    }
  }
  EXPECT_EQ(seen.size(), 70u);
  EXPECT_EQ(build_judge_forms(cohort.store, exam, cohort.baselines, 9), forms);
  EXPECT_EQ(form_from_json(to_json(forms[2])), forms[2]);
}

TEST(JudgeForms, SingleBaselineIsOneForm) {
  auto cohort = testing::make_cohort(1, 1, 3);
  auto forms = build_judge_forms(cohort.store, cohort.exams[0], cohort.baselines, 1);
  ASSERT_EQ(forms.size(), 1u);
  EXPECT_EQ(forms[0].items.size(), 10u);
  std::vector<std::string> missing = {"nobody"};
  EXPECT_THROW(build_judge_forms(cohort.store, cohort.exams[0], missing, 1), Error);
}

TEST(JudgePrompts, CountsAndTarget) {
  auto cohort = testing::make_cohort(1, 1, 3);
  auto form = build_judge_forms(cohort.store, cohort.exams[0], cohort.baselines, 1)[0];
  std::string user = judge_user_prompt(form, "  background text  ", JudgeMode::kIdentifyNonhuman);
  EXPECT_THAT(user, HasSubstr("Answer1-9: "));
  EXPECT_THAT(user, HasSubstr("\n\nbackground text\n\n"));
  EXPECT_THAT(user, HasSubstr("the LLM-generated answer"));
  EXPECT_THAT(judge_user_prompt(form, "b", JudgeMode::kIdentifyHuman), HasSubstr("the human answer"));
  EXPECT_THAT(judge_system_prompt(JudgeMode::kIdentifyHuman, 10), HasSubstr("ten"));
}

TEST(ParseJudgeOutput, SelectionBlock) {
  EXPECT_THAT(parse_judge_output(selections_block({1, 0, 1}), 3), ElementsAre(1, 0, 1));
  EXPECT_THAT(parse_judge_output("selections:\nAnswer1-0\nAnswer0-1\n", 2), ElementsAre(1, 0));
  EXPECT_THAT(parse_judge_output("SELECTIONS:\nQuestion 0: 1\nQuestion 1: 0\n", 2), ElementsAre(1, 0));
}

TEST(ParseJudgeOutput, LaterBlockWins) {
  std::string text = selections_block({0, 0}) + "\nOn reflection:\n" + selections_block({1, 1});
  EXPECT_THAT(parse_judge_output(text, 2), ElementsAre(1, 1));
}

TEST(ParseJudgeOutput, ContradictionIsRejected) {
  try {
    parse_judge_output("SELECTIONS:\nAnswer0-0\nAnswer1-0\nAnswer1-1\n", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kJudgeParseError);
    EXPECT_THAT(e.what(), HasSubstr("contradictory"));
  }
}

TEST(ParseJudgeOutput, IncompleteNamesMissingQuestions) {
  std::vector<int> eight(8, 1);
  try {
    parse_judge_output(selections_block(eight), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kJudgeParseError);
    EXPECT_THAT(e.what(), HasSubstr("incomplete"));
    EXPECT_THAT(e.what(), HasSubstr("8"));
    EXPECT_THAT(e.what(), HasSubstr("9"));
  }
}

TEST(ParseJudgeOutput, FallbackScansTokens) {
  EXPECT_THAT(parse_judge_output("I think Answer1-0 is human, and Answer0-1 too.", 2), ElementsAre(1, 0));
  EXPECT_THROW(parse_judge_output("I cannot tell.", 2), Error);
}

class RunJudgeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cohort = testing::make_cohort(1, 1, 3);
    form = build_judge_forms(cohort.store, cohort.exams[0], cohort.baselines, 1)[0];
  }
  void use(std::function<std::string(const ChatRequest&)> f) {
    client.register_provider("fn", std::make_shared<FunctionProvider>([this, f](const ChatRequest& r) {
      std::lock_guard lock(mutex);
      requests.push_back(r);
      return f(r);
    }));
  }
  testing::Cohort cohort;
  JudgeForm form;
  ChatClient client;
  std::mutex mutex;
  std::vector<ChatRequest> requests;
};

TEST_F(RunJudgeTest, ConstantJudgeGivesIdenticalIterations) {
  use([](const ChatRequest&) { return selections_block(std::vector<int>(10, 0)); });
  JudgeRunResult r = run_judge(client, config(3), form, "bg");
  ASSERT_EQ(r.verdicts.size(), 3u);
  EXPECT_EQ(r.failed_iterations, 0);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(r.verdicts[k].iteration, k + 1);
    EXPECT_EQ(r.verdicts[k].selections, r.verdicts[0].selections);
  }
  // Iterations are distinct replicates, so none is served from cache.
  ASSERT_EQ(requests.size(), 3u);
  EXPECT_EQ(requests[2].replicate, 2);
  EXPECT_EQ(requests[0].messages[0].role, Role::kSystem);
}

TEST_F(RunJudgeTest, NineOfTenDeceptions) {
  use([this](const ChatRequest&) {
    std::vector<int> picks;
    for (std::size_t i = 0; i < form.items.size(); ++i) {
      int human = form.items[i].truth_slot;
      picks.push_back(i < 9 ? 1 - human : human);
    }
    return selections_block(picks);
  });
  JudgeRunResult r = run_judge(client, config(1), form, "bg");
  EXPECT_EQ(count_deceptions(form, r.verdicts[0]), 9u);
  JudgeVerdictSet flipped = r.verdicts[0];
  flipped.mode = JudgeMode::kIdentifyNonhuman;
  EXPECT_EQ(count_deceptions(form, flipped), 1u);
}

TEST_F(RunJudgeTest, AlwaysProseFails) {
  use([](const ChatRequest&) { return std::string("Both answers read naturally to me."); });
  try {
    run_judge(client, config(2), form, "bg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kJudgeParseError);
  }
  // Two iterations, each the first ask plus two re-asks.
  EXPECT_EQ(requests.size(), 6u);
}

TEST_F(RunJudgeTest, ProseTwiceThenValidSucceeds) {
  use([](const ChatRequest& r) {
    if (r.messages.size() < 6) return std::string("Hmm, hard to say.");
    return selections_block(std::vector<int>(10, 1));
  });
  JudgeRunResult r = run_judge(client, config(1), form, "bg");
  ASSERT_EQ(r.verdicts.size(), 1u);
  EXPECT_EQ(requests.size(), 3u);
  EXPECT_THAT(requests[1].messages.back().content, HasSubstr("from 0 to 9"));
}

TEST_F(RunJudgeTest, FailedIterationIsCounted) {
  use([](const ChatRequest& r) {
    if (r.replicate == 1) return std::string("no idea");
    return selections_block(std::vector<int>(10, 0));
  });
  JudgeRunResult r = run_judge(client, config(3), form, "bg");
  EXPECT_EQ(r.verdicts.size(), 2u);
  EXPECT_EQ(r.failed_iterations, 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_THAT(r.failures[0], HasSubstr("iteration 2"));
  EXPECT_EQ(r.verdicts[1].iteration, 3);
}

TEST(ControlModel, LongerAnswerAndTies) {
  JudgeItem item;
  item.answer0 = "short";
  item.answer1 = "a longer one";
  EXPECT_EQ(control_model_select(item, JudgeMode::kIdentifyHuman), 1);
  item.answer1 = "tie!!";
  EXPECT_EQ(control_model_select(item, JudgeMode::kIdentifyHuman), 0);
  // Code points, not bytes.
  item.answer0 = "ééé";
  item.answer1 = "abcd";
  EXPECT_EQ(control_model_select(item, JudgeMode::kIdentifyNonhuman), 1);
}

TEST(ControlModel, ModesAreComplementaryWithoutTies) {
  auto cohort = testing::make_cohort(3, 7, 21);
  std::size_t human = 0, nonhuman = 0, total = 0;
  for (const auto& exam : cohort.exams) {
    for (const auto& form : build_judge_forms(cohort.store, exam, cohort.baselines, 5)) {
      human += count_deceptions(form, run_control(form, JudgeMode::kIdentifyHuman));
      nonhuman += count_deceptions(form, run_control(form, JudgeMode::kIdentifyNonhuman));
      total += form.items.size();
    }
  }
  EXPECT_EQ(human + nonhuman, total);
}

TEST(VerdictLog, RecordShape) {
  auto cohort = testing::make_cohort(1, 1, 3);
  auto form = build_judge_forms(cohort.store, cohort.exams[0], cohort.baselines, 1)[0];
  auto rec = verdict_log_record(form, run_control(form, JudgeMode::kIdentifyNonhuman), "control");
  EXPECT_EQ(rec["judge"], "control");
  EXPECT_EQ(rec["mode"], "identify_nonhuman");
  EXPECT_EQ(rec["iteration"], 1);
  ASSERT_EQ(rec["items"].size(), 10u);
  EXPECT_EQ(rec["items"][0]["truth_slot"], form.items[0].truth_slot);
  EXPECT_EQ(rec["items"][0]["baseline_id"], "baseline-0");
}

TEST(JudgeMode, Names) {
  EXPECT_EQ(mode_from_name("identify-nonhuman"), JudgeMode::kIdentifyNonhuman);
  EXPECT_EQ(mode_name(JudgeMode::kIdentifyHuman), "identify_human");
  EXPECT_THROW(mode_from_name("robot"), Error);
}

}  // namespace
}  // namespace roleeval
