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

#include "roleeval/evalservice.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"
#include "roleeval/error.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

const std::string_view kEvaluatorInstructions =
    "You will see ten questions. Each question has two answers: one written by the person you know and one "
    "written by a language model imitating them. For each question, choose the answer you believe the person "
    "wrote. Consider the tone, the thought process behind the answer, and how well it matches what you know "
    "about the person. Answers cannot be changed once submitted.";

struct EvalService::Slot {
  mutable std::mutex mutex;
  EvaluatorSession session;
  std::vector<std::string> answered;
};

namespace {

std::int64_t wall_clock() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

nlohmann::json session_to_json(const EvaluatorSession& s) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : s.pairs) pairs.push_back(to_json(p));
  return {{"session_id", s.session_id}, {"evaluator_id", s.evaluator_id}, {"person_id", s.person_id},
          {"seed", s.seed}, {"cohort_index", s.cohort_index}, {"pairs", pairs}};
}

EvaluatorSession session_from_log(const nlohmann::json& j) {
  EvaluatorSession s;
  s.session_id = j.at("session_id").get<std::string>();
  s.evaluator_id = j.at("evaluator_id").get<std::string>();
  s.person_id = j.at("person_id").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.cohort_index = j.at("cohort_index").get<int>();
  for (const auto& p : j.at("pairs")) s.pairs.push_back(pair_from_json(p));
  return s;
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::kIoError, std::string("log write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view session_state_name(SessionState state) {
  return state == SessionState::kOpen ? "open" : "complete";
}

EvalService::EvalService(ResponseStore responses, std::vector<Exam> exams, std::filesystem::path log_path,
                         Clock clock)
    : responses_(std::move(responses)), log_path_(std::move(log_path)), clock_(std::move(clock)) {
  if (!clock_) clock_ = wall_clock;
  for (auto& exam : exams) {
    std::string person = exam.person_id;
    if (!exams_.emplace(person, std::move(exam)).second) {
      throw Error(ErrorKind::kInvalidArgument, "two exams for person " + person);
    }
  }
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  replay();
  fd_ = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorKind::kIoError, "cannot open " + log_path_.string());
}

EvalService::~EvalService() {
  if (fd_ >= 0) ::close(fd_);
}

void EvalService::replay() {
  std::error_code ec;
  if (!std::filesystem::exists(log_path_, ec)) return;
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + log_path_.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();

  std::size_t pos = 0;
  std::size_t good_end = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    bool terminated = nl != std::string::npos;
    std::string_view line(data.data() + pos, (terminated ? nl : data.size()) - pos);
    std::size_t next = terminated ? nl + 1 : data.size();
    if (trim_view(line).empty()) {
      pos = good_end = next;
      continue;
    }
    nlohmann::json record;
    bool parsed = terminated;
    if (parsed) {
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        parsed = false;
      }
    }
    if (!parsed) {
      if (next < data.size()) throw Error(ErrorKind::kParseError, "corrupt record in " + log_path_.string());
      break;  // torn tail from an interrupted append
    }
    try {
      const std::string type = record.at("type").get<std::string>();
      if (type == "session") {
        apply_session(session_from_log(record.at("session")));
      } else if (type == "verdict") {
        apply_verdict({record.at("session_id").get<std::string>(), record.at("pair_id").get<std::string>(),
                       record.at("chosen_slot").get<int>(), record.at("submitted_at").get<std::int64_t>()});
      } else {
        throw Error(ErrorKind::kParseError, "unknown record type " + type);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParseError, std::string("malformed log record: ") + e.what());
    }
    pos = good_end = next;
  }
  if (good_end < data.size()) std::filesystem::resize_file(log_path_, good_end);
}

void EvalService::apply_session(EvaluatorSession session) {
  auto s = std::make_unique<Slot>();
  std::string id = session.session_id;
  cohort_size_[session.person_id] = std::max(cohort_size_[session.person_id], session.cohort_index + 1);
  s->session = std::move(session);
  sessions_[id] = std::move(s);
}

void EvalService::apply_verdict(const Verdict& verdict) {
  auto it = sessions_.find(verdict.session_id);
  if (it == sessions_.end()) throw Error(ErrorKind::kParseError, "verdict for unknown session in log");
  Slot& s = *it->second;
  s.session.verdicts[verdict.pair_id] = verdict.chosen_slot;
  s.answered.push_back(verdict.pair_id);
  if (s.session.verdicts.size() == s.session.pairs.size()) s.session.state = SessionState::kComplete;
}

void EvalService::append(const nlohmann::json& record) {
  std::lock_guard lock(log_mutex_);
  write_all(fd_, record.dump() + "\n");
  if (::fsync(fd_) != 0) throw Error(ErrorKind::kIoError, std::string("fsync failed: ") + std::strerror(errno));
}

EvalService::Slot& EvalService::slot(std::string_view session_id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorKind::kUnknownSession, "unknown session " + std::string(session_id), {std::string(session_id)});
  }
  return *it->second;
}

EvaluatorSession EvalService::create_session(std::string_view person_id, std::string_view evaluator_id,
                                             std::uint64_t seed) {
  if (is_blank(person_id) || is_blank(evaluator_id)) {
    throw Error(ErrorKind::kInvalidArgument, "person_id and evaluator token are required");
  }
  auto exam_it = exams_.find(person_id);
  if (exam_it == exams_.end()) {
    throw Error(ErrorKind::kMissingResponse, "no exam for person " + std::string(person_id),
                {std::string(person_id)});
  }
  const Exam& exam = exam_it->second;
  std::vector<std::string> baselines;
  for (const auto& b : responses_.baselines_for(person_id)) {
    bool complete = true;
    for (const auto& q : exam.questions) complete = complete && responses_.find(person_id, q.question_id, b);
    if (complete) baselines.push_back(b);
  }
  if (baselines.empty()) {
    throw Error(ErrorKind::kMissingResponse, "no complete machine responses for " + std::string(person_id),
                {std::string(person_id)});
  }

  const std::string session_id =
      short_id("s", {std::string(person_id), std::string(evaluator_id), std::to_string(seed)}, 16);

  std::unique_lock lock(sessions_mutex_);
  if (sessions_.contains(session_id)) {
    throw Error(ErrorKind::kConflict, "session already exists for this person, evaluator and seed",
                {session_id});
  }
  EvaluatorSession session;
  session.session_id = session_id;
  session.evaluator_id = std::string(evaluator_id);
  session.person_id = std::string(person_id);
  session.seed = seed;
  session.cohort_index = cohort_size_[session.person_id];
  std::map<std::string, std::string> assignment;
  for (std::size_t i = 0; i < exam.questions.size(); ++i) {
    assignment[exam.questions[i].question_id] =
        baselines[(static_cast<std::size_t>(session.cohort_index) + i) % baselines.size()];
  }
  session.pairs = make_pairs(responses_, exam, baselines, assignment, seed);

  append({{"type", "session"}, {"session", session_to_json(session)}});
  apply_session(session);
  return session;
}

SessionProgress EvalService::progress_of(const Slot& s) {
  return {s.session.session_id, s.session.state, s.session.verdicts.size(), s.session.pairs.size(), s.answered};
}

SessionProgress EvalService::submit_verdict(std::string_view session_id, std::string_view pair_id,
                                            int chosen_slot) {
  if (chosen_slot != 0 && chosen_slot != 1) throw Error(ErrorKind::kInvalidArgument, "chosen_slot must be 0 or 1");
  Slot& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  if (s.session.state == SessionState::kComplete) {
    throw Error(ErrorKind::kSessionComplete, "session " + std::string(session_id) + " is complete");
  }
  bool known = false;
  for (const auto& p : s.session.pairs) known = known || p.pair_id == pair_id;
  if (!known) {
    throw Error(ErrorKind::kUnknownPair, "pair " + std::string(pair_id) + " is not in this session",
                {std::string(pair_id)});
  }
  if (s.session.verdicts.contains(std::string(pair_id))) {
    throw Error(ErrorKind::kDuplicateVerdict, "pair " + std::string(pair_id) + " already has a verdict",
                {std::string(pair_id)});
  }
  Verdict v{std::string(session_id), std::string(pair_id), chosen_slot, clock_()};
  append({{"type", "verdict"}, {"session_id", v.session_id}, {"pair_id", v.pair_id},
          {"chosen_slot", v.chosen_slot}, {"submitted_at", v.submitted_at}});
  s.session.verdicts[v.pair_id] = chosen_slot;
  s.answered.push_back(v.pair_id);
  if (s.session.verdicts.size() == s.session.pairs.size()) s.session.state = SessionState::kComplete;
  return progress_of(s);
}

std::size_t EvalService::session_score(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  if (s.session.state != SessionState::kComplete) {
    throw Error(ErrorKind::kSessionIncomplete, "session " + std::string(session_id) + " is not complete");
  }
  std::size_t deceptions = 0;
  for (const auto& p : s.session.pairs) {
    if (s.session.verdicts.at(p.pair_id) != p.truth_slot) ++deceptions;
  }
  return deceptions;
}

EvaluatorSession EvalService::session(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  return s.session;
}

SessionProgress EvalService::progress(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  return progress_of(s);
}

std::vector<std::string> EvalService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

nlohmann::json EvalService::blinded_pairs(std::string_view session_id) const {
  EvaluatorSession s = session(session_id);
  return blinded_pairs_json(s.pairs, responses_, exams_.find(s.person_id)->second);
}

nlohmann::json EvalService::verdict_records() const {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& id : session_ids()) {
    EvaluatorSession s = session(id);
    if (s.state != SessionState::kComplete) continue;
    const Exam& exam = exams_.find(s.person_id)->second;
    nlohmann::json items = nlohmann::json::array();
    for (const auto& p : s.pairs) {
      items.push_back({{"question_id", p.question_id},
                       {"category", code_of(exam.question(p.question_id).category)},
                       {"baseline_id", p.baseline_id},
                       {"truth_slot", p.truth_slot},
                       {"selection", s.verdicts.at(p.pair_id)}});
    }
    records.push_back({{"form_id", s.session_id}, {"person_id", s.person_id}, {"judge", "human"},
                       {"mode", "identify_human"}, {"iteration", 1}, {"items", items}});
  }
  return records;
}

EvalServerConfig EvalServerConfig::from_json(const nlohmann::json& j) {
  EvalServerConfig c;
  try {
    c.bind_address = j.value("bind_address", c.bind_address);
    c.port = j.value("port", c.port);
    c.data_dir = j.value("data_dir", c.data_dir.string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, std::string("bad server config: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorKind::kConfigError, "port out of range");
  return c;
}

EvalServerConfig EvalServerConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfigError, "cannot read " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, path.string() + ": " + e.what());
  }
}

namespace {

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownSession:
    case ErrorKind::kUnknownPair:
      return 404;
    case ErrorKind::kConflict:
    case ErrorKind::kDuplicateVerdict:
    case ErrorKind::kSessionComplete:
    case ErrorKind::kSessionIncomplete:
      return 409;
    case ErrorKind::kMissingResponse:
      return 422;
    case ErrorKind::kIoError:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json progress_json(const SessionProgress& p) {
  return {{"session_id", p.session_id}, {"state", session_state_name(p.state)}, {"completed", p.completed},
          {"total", p.total}, {"answered", p.answered}};
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_json(res, http_status(e.kind()), {{"error", error_kind_name(e.kind())}, {"message", e.what()}});
  } catch (const nlohmann::json::exception& e) {
    send_json(res, 400, {{"error", "InvalidArgument"}, {"message", e.what()}});
  }
}

nlohmann::json parse_body(const httplib::Request& req) {
  nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorKind::kInvalidArgument, "request body must be a JSON object");
  }
  return body;
}

}  // namespace

EvalHttpServer::EvalHttpServer(EvalService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      nlohmann::json body = parse_body(req);
      std::uint64_t seed = body.at("seed").get<std::uint64_t>();
      EvaluatorSession s = service_.create_session(body.at("person_id").get<std::string>(),
                                                   body.at("evaluator_token").get<std::string>(), seed);
      nlohmann::json out = progress_json(service_.progress(s.session_id));
      out["instructions"] = kEvaluatorInstructions;
      send_json(res, 201, out);
    });
  });
  server_->Get(R"(/sessions/([^/]+)/pairs)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service_.blinded_pairs(req.matches[1].str())); });
  });
  server_->Post(R"(/sessions/([^/]+)/verdicts)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      nlohmann::json body = parse_body(req);
      SessionProgress p = service_.submit_verdict(req.matches[1].str(), body.at("pair_id").get<std::string>(),
                                                  body.at("chosen_slot").get<int>());
      send_json(res, 200, progress_json(p));
    });
  });
  server_->Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      nlohmann::json out = progress_json(service_.progress(req.matches[1].str()));
      out["instructions"] = kEvaluatorInstructions;
      send_json(res, 200, out);
    });
  });
}

EvalHttpServer::~EvalHttpServer() { stop(); }

int EvalHttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool EvalHttpServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }
bool EvalHttpServer::listen_after_bind() { return server_->listen_after_bind(); }
void EvalHttpServer::stop() {
  if (server_->is_running()) server_->stop();
}
bool EvalHttpServer::is_running() const { return server_->is_running(); }
void EvalHttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace roleeval
