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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/questionbank.hpp"

namespace httplib {
class Server;
}

namespace roleeval {

enum class SessionState { kOpen, kComplete };

std::string_view session_state_name(SessionState state);

struct EvaluatorSession {
  std::string session_id;
  std::string evaluator_id;  // opaque token
  std::string person_id;
  std::uint64_t seed = 0;
  int cohort_index = 0;  // k-th session created for the person
  std::vector<EvaluationPair> pairs;
  std::map<std::string, int> verdicts;  // pair_id -> chosen slot
  SessionState state = SessionState::kOpen;
};

struct Verdict {
  std::string session_id;
  std::string pair_id;
  int chosen_slot = 0;
  std::int64_t submitted_at = 0;
};

struct SessionProgress {
  std::string session_id;
  SessionState state = SessionState::kOpen;
  std::size_t completed = 0;
  std::size_t total = 0;
  std::vector<std::string> answered;  // pair ids in submission order
};

// Guidance shown on the session intro screen.
extern const std::string_view kEvaluatorInstructions;

// Session store backed by an append-only JSONL log. Each record is fsynced
// before the call returns; the log is replayed on construction and a torn
// final line (crash mid-write) is dropped.
//
// Log records:
//   {"type":"session","session":{...,"pairs":[...]}}
//   {"type":"verdict","session_id":...,"pair_id":...,"chosen_slot":0|1,"submitted_at":...}
class EvalService {
 public:
  using Clock = std::function<std::int64_t()>;

  EvalService(ResponseStore responses, std::vector<Exam> exams, std::filesystem::path log_path,
              Clock clock = {});
  ~EvalService();
  EvalService(const EvalService&) = delete;
  EvalService& operator=(const EvalService&) = delete;

  // Draws the session's pairs. The k-th session of a person assigns exam
  // question i to baseline (k + i) mod m, so a cohort covers every baseline.
  // Throws kConflict for a repeated (person, evaluator, seed) and
  // kMissingResponse when the person has no complete machine answers.
  EvaluatorSession create_session(std::string_view person_id, std::string_view evaluator_id, std::uint64_t seed);

  // Throws kUnknownSession, kUnknownPair, kDuplicateVerdict, kSessionComplete.
  SessionProgress submit_verdict(std::string_view session_id, std::string_view pair_id, int chosen_slot);

  // Pairs where the evaluator picked the machine answer. kSessionIncomplete
  // while open.
  std::size_t session_score(std::string_view session_id) const;

  EvaluatorSession session(std::string_view session_id) const;
  SessionProgress progress(std::string_view session_id) const;
  std::vector<std::string> session_ids() const;
  nlohmann::json blinded_pairs(std::string_view session_id) const;

  // Verdict-log records of complete sessions (judge "human"), for analytics.
  nlohmann::json verdict_records() const;

  const std::filesystem::path& log_path() const { return log_path_; }

 private:
  struct Slot;

  Slot& slot(std::string_view session_id) const;
  void append(const nlohmann::json& record);
  void replay();
  void apply_session(EvaluatorSession session);
  void apply_verdict(const Verdict& verdict);
  static SessionProgress progress_of(const Slot& s);

  ResponseStore responses_;
  std::map<std::string, Exam, std::less<>> exams_;  // by person
  std::filesystem::path log_path_;
  Clock clock_;
  int fd_ = -1;
  std::mutex log_mutex_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<Slot>, std::less<>> sessions_;
  std::map<std::string, int, std::less<>> cohort_size_;
};

struct EvalServerConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "evalservice";

  static EvalServerConfig from_json(const nlohmann::json& j);
  static EvalServerConfig load(const std::filesystem::path& path);
};

// HTTP front end:
//   POST /sessions                {person_id, evaluator_token, seed}
//   GET  /sessions/{id}/pairs     blinded pairs
//   POST /sessions/{id}/verdicts  {pair_id, chosen_slot}
//   GET  /sessions/{id}/state
// Errors are {"error": kind, "message": text} with 400/404/409/422.
class EvalHttpServer {
 public:
  explicit EvalHttpServer(EvalService& service);
  ~EvalHttpServer();

  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  bool listen_after_bind();
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

 private:
  EvalService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace roleeval
