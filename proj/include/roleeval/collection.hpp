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
#include "roleeval/questionbank.hpp"

namespace roleeval {

// Curated misspelling -> correction table. Keys are matched per token,
// case-insensitively. A correction may not contain a key (chained or cyclic
// corrections would break idempotence).
class MisspellingDictionary {
 public:
  MisspellingDictionary() = default;
  explicit MisspellingDictionary(const std::map<std::string, std::string>& entries);

  static MisspellingDictionary from_json(const nlohmann::json& j);
  static MisspellingDictionary load(const std::filesystem::path& path);

  const std::string* lookup(std::string_view token) const;
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;  // lower-case key -> correction
};

// Trims, collapses whitespace runs, upper-cases the first letter of every
// sentence and applies the dictionary. Deterministic and idempotent. Throws
// kEmptyInput for blank text.
std::string normalize_response(std::string_view raw, const MisspellingDictionary& dictionary = {});

inline constexpr std::string_view kHumanSource = "human";

struct ResponseRecord {
  std::string response_id;
  std::string person_id;
  std::string question_id;
  std::string source;  // "human" or a baseline_id
  std::string raw;
  std::string normalized;
  std::int64_t created_at = 0;  // unix seconds

  bool operator==(const ResponseRecord&) const = default;
};

ResponseRecord make_response(std::string_view person_id, std::string_view question_id,
                             std::string_view source, std::string_view raw,
                             const MisspellingDictionary& dictionary, std::int64_t created_at);

nlohmann::json to_json(const ResponseRecord& r);
ResponseRecord response_from_json(const nlohmann::json& j);

// Append-only store, one record per (person, question, source).
class ResponseStore {
 public:
  void add(ResponseRecord record);  // kConflict on a duplicate slot
  const ResponseRecord* find(std::string_view person_id, std::string_view question_id,
                             std::string_view source) const;
  const ResponseRecord& by_id(std::string_view response_id) const;
  const std::vector<ResponseRecord>& records() const { return records_; }
  // Machine sources (baseline ids) with at least one answer for the person.
  std::vector<std::string> baselines_for(std::string_view person_id) const;

  nlohmann::json to_json() const;
  static ResponseStore from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ResponseStore load(const std::filesystem::path& path);

 private:
  std::vector<ResponseRecord> records_;
  std::map<std::string, std::size_t> by_slot_;
  std::map<std::string, std::size_t> by_id_;
};

// Import file: JSON array of {question_id, text}. Throws kUnknownQuestion
// for an answer outside the exam and kMissingAnswers listing unanswered ids.
std::vector<ResponseRecord> import_human_responses(const std::filesystem::path& path, const Exam& exam,
                                                   const MisspellingDictionary& dictionary,
                                                   std::int64_t created_at);
std::vector<ResponseRecord> import_human_responses(const nlohmann::json& answers, const Exam& exam,
                                                   const MisspellingDictionary& dictionary,
                                                   std::int64_t created_at);

struct EvaluationPair {
  std::string pair_id;
  std::string question_id;
  std::string person_id;
  std::string slot0;  // response_id
  std::string slot1;
  int truth_slot = 0;  // slot holding the human answer
  std::string baseline_id;

  bool operator==(const EvaluationPair&) const = default;
};

nlohmann::json to_json(const EvaluationPair& p);
EvaluationPair pair_from_json(const nlohmann::json& j);

// One pair per exam question. Without an assignment, the machine side is
// drawn uniformly from `baselines` per question; slot order is a seeded fair
// coin per pair. Throws kMissingResponse naming question and source.
std::vector<EvaluationPair> make_pairs(const ResponseStore& store, const Exam& exam,
                                       std::span<const std::string> baselines,
                                       const std::optional<std::map<std::string, std::string>>& assignment,
                                       std::uint64_t seed);

// Evaluator-facing payload: [{pair_id, question_text, answer_a, answer_b}].
// Carries no source, baseline or truth information.
nlohmann::json blinded_pairs_json(std::span<const EvaluationPair> pairs, const ResponseStore& store,
                                  const Exam& exam);

}  // namespace roleeval
