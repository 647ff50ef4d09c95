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

#include "test_support.hpp"

#include <unistd.h>

#include <set>

#include "roleeval/rng.hpp"
#include "roleeval/text.hpp"

namespace roleeval::testing {

namespace {

constexpr const char* kWords[] = {"river", "kitchen", "morning", "train", "garden", "letter", "music",
                                  "window", "friend", "winter", "coffee", "market", "story", "bridge",
                                  "summer", "library", "bicycle", "island", "candle", "harbor"};

}  // namespace

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ROLEEVAL_FIXTURE_DIR) / name; }

std::filesystem::path template_dir() { return std::filesystem::path(ROLEEVAL_TEMPLATE_DIR); }

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "roleeval-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<PersonProfile> fixture_profiles() { return load_profiles(fixture("profiles_valid.json")).profiles; }

std::vector<Question> fixture_pool(const std::vector<PersonProfile>& profiles) {
  std::vector<Question> pool;
  for (auto category : all_question_categories()) {
    const std::string code(code_of(category));
    if (scope_of(category) == QuestionScope::kGeneral) {
      for (int k = 0; k < 2; ++k) {
        Question q;
        q.category = category;
        q.text = "General " + code + " question number " + std::to_string(k) + "?";
        q.question_id = short_id(code, {q.text}, 10);
        q.status = QuestionStatus::kAccepted;
        pool.push_back(q);
      }
    } else {
      for (const auto& p : profiles) {
        for (int k = 0; k < 2; ++k) {
          Question q;
          q.category = category;
          q.text = "For " + p.person_id + ", " + code + " question number " + std::to_string(k) + "?";
          q.question_id = short_id(p.person_id + "-" + code, {q.text}, 10);
          q.target_person = p.person_id;
          q.status = QuestionStatus::kAccepted;
          pool.push_back(q);
        }
      }
    }
  }
  return pool;
}

std::string filler_text(std::uint64_t seed, std::size_t words) {
  SeededRng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out += ' ';
    out += kWords[rng.uniform_index(std::size(kWords))];
  }
  return out + ".";
}

Cohort make_cohort(std::size_t persons, std::size_t baselines, std::uint64_t seed) {
  Cohort c;
  auto all = fixture_profiles();
  c.profiles.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(persons));
  c.pool = fixture_pool(c.profiles);
  for (std::size_t b = 0; b < baselines; ++b) c.baselines.push_back("baseline-" + std::to_string(b));
  SeededRng rng(derive_seed(seed, "cohort"));
  for (const auto& p : c.profiles) {
    Exam exam = assemble_exam(p.person_id, c.pool, seed);
    for (const auto& q : exam.questions) {
      std::set<std::size_t> used_lengths;
      auto add = [&](const std::string& source) {
        std::string text;
        do {
          text = filler_text(rng.next(), 4 + rng.uniform_index(30));
        } while (!used_lengths.insert(utf8_length(normalize_response(text))).second);
        c.store.add(make_response(p.person_id, q.question_id, source, text, {}, 0));
      };
      add(std::string(kHumanSource));
      for (const auto& b : c.baselines) add(b);
    }
    c.exams.push_back(std::move(exam));
  }
  return c;
}

}  // namespace roleeval::testing
