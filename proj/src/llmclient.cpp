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

#include "roleeval/llmclient.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "roleeval/error.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

std::string shortest_decimal(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void append_field(std::string& out, std::string_view name, std::string_view value) {
  out.append(name);
  out.push_back(':');
  out.append(std::to_string(value.size()));
  out.push_back(':');
  out.append(value);
  out.push_back('\n');
}

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

Role role_from_name(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  throw Error(ErrorKind::kParseError, "unknown chat role '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (is_blank(provider_id)) throw Error(ErrorKind::kInvalidArgument, "provider_id is empty");
  if (is_blank(model_id)) throw Error(ErrorKind::kInvalidArgument, "model_id is empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "temperature " + shortest_decimal(temperature) + " outside [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "top_p " + shortest_decimal(top_p) + " outside (0, 1]");
  }
  if (max_retries < 0) throw Error(ErrorKind::kInvalidArgument, "max_retries is negative");
  if (max_tokens && *max_tokens <= 0) throw Error(ErrorKind::kInvalidArgument, "max_tokens must be positive");
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json j = {{"provider_id", spec.provider_id},
                      {"model_id", spec.model_id},
                      {"temperature", spec.temperature},
                      {"top_p", spec.top_p},
                      {"max_retries", spec.max_retries}};
  if (spec.max_tokens) j["max_tokens"] = *spec.max_tokens;
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.provider_id = j.at("provider_id").get<std::string>();
  spec.model_id = j.at("model_id").get<std::string>();
  spec.temperature = j.value("temperature", 0.0);
  spec.top_p = j.value("top_p", 1.0);
  spec.max_retries = j.value("max_retries", 3);
  if (j.contains("max_tokens") && !j["max_tokens"].is_null()) spec.max_tokens = j["max_tokens"].get<int>();
  spec.validate();
  return spec;
}

std::string CacheKey::canonical_form(const ModelSpec& spec, std::span<const ChatMessage> messages,
                                     int replicate) {
  std::string out = "roleeval-chat-v1\n";
  append_field(out, "provider", spec.provider_id);
  append_field(out, "model", spec.model_id);
  append_field(out, "temperature", shortest_decimal(spec.temperature));
  append_field(out, "top_p", shortest_decimal(spec.top_p));
  if (spec.max_tokens) append_field(out, "max_tokens", std::to_string(*spec.max_tokens));
  if (replicate != 0) append_field(out, "replicate", std::to_string(replicate));
  for (const auto& m : messages) append_field(out, role_name(m.role), m.content);
  return out;
}

CacheKey CacheKey::of(const ModelSpec& spec, std::span<const ChatMessage> messages, int replicate) {
  return CacheKey{sha256_hex(canonical_form(spec, messages, replicate))};
}

MockProvider::MockProvider(std::map<CacheKey, std::string> script) : script_(std::move(script)) {
  for (const auto& [key, text] : script_) {
    if (key.digest.size() != 64 ||
        key.digest.find_first_not_of("0123456789abcdef") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "malformed script key '" + key.digest + "'");
    }
  }
}

std::string MockProvider::complete(const ChatRequest& request) {
  ++calls_;
  CacheKey key = CacheKey::of(request);
  auto it = script_.find(key);
  if (it == script_.end()) {
    throw Error(ErrorKind::kMockMiss, "no scripted completion for key " + key.digest, {key.digest});
  }
  return it->second;
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
  auto delay = initial_delay;
  for (int i = 0; i < retry && delay < max_delay; ++i) delay *= 2;
  return std::min(delay, max_delay);
}

// --- ResponseCache ---------------------------------------------------------

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot create cache dir " + dir_->string() + ": " + ec.message());
  }
}

std::mutex& ResponseCache::writer_lock(const CacheKey& key) const {
  std::size_t h = std::hash<std::string>{}(key.digest);
  return writer_locks_[h % writer_locks_.size()];
}

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
  {
    std::shared_lock lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  std::filesystem::path file = *dir_ / (key.digest + ".json");
  std::ifstream in(file);
  if (!in) return std::nullopt;
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // torn write; treat as a miss and overwrite later
  }
  if (record.value("digest", "") != key.digest || !record.contains("completion")) return std::nullopt;
  std::string text = record["completion"].get<std::string>();
  std::unique_lock lock(mutex_);
  memory_.emplace(key, text);
  return text;
}

void ResponseCache::put(const CacheKey& key, const ChatRequest& request,
                        const std::string& completion) {
  std::lock_guard writer(writer_lock(key));
  if (dir_) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
      messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    nlohmann::json record = {{"digest", key.digest},
                             {"provider_id", request.spec.provider_id},
                             {"model_id", request.spec.model_id},
                             {"temperature", request.spec.temperature},
                             {"top_p", request.spec.top_p},
                             {"messages", messages},
                             {"completion", completion}};
    if (request.spec.max_tokens) record["max_tokens"] = *request.spec.max_tokens;
    if (request.replicate != 0) record["replicate"] = request.replicate;
    std::filesystem::path final_path = *dir_ / (key.digest + ".json");
    std::filesystem::path tmp_path = *dir_ / (key.digest + ".json.tmp");
    {
      std::ofstream out(tmp_path, std::ios::trunc);
      if (!out) throw Error(ErrorKind::kIoError, "cannot write " + tmp_path.string());
      out << record.dump(2) << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot rename cache record: " + ec.message());
  }
  std::unique_lock lock(mutex_);
  memory_[key] = completion;
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return memory_.size();
}

// --- ChatClient ------------------------------------------------------------

ChatClient::ChatClient(ClientOptions options)
    : options_(std::move(options)), cache_(options_.cache_dir) {
  if (!options_.retry.sleep) {
    options_.retry.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

void ChatClient::register_provider(const std::string& provider_id,
                                   std::shared_ptr<Provider> provider) {
  std::unique_lock lock(providers_mutex_);
  providers_[provider_id] = std::move(provider);
}

std::shared_ptr<MockProvider> ChatClient::register_mock_provider(
    const std::string& provider_id, std::map<CacheKey, std::string> script) {
  auto mock = std::make_shared<MockProvider>(std::move(script));
  register_provider(provider_id, mock);
  return mock;
}

bool ChatClient::has_provider(const std::string& provider_id) const {
  std::shared_lock lock(providers_mutex_);
  return providers_.count(provider_id) != 0;
}

std::shared_ptr<Provider> ChatClient::provider_for(const std::string& provider_id) const {
  std::shared_lock lock(providers_mutex_);
  auto it = providers_.find(provider_id);
  if (it == providers_.end()) {
    throw Error(ErrorKind::kConfigError, "no provider registered for '" + provider_id + "'");
  }
  return it->second;
}

void ChatClient::acquire_slot() {
  std::unique_lock lock(gate_mutex_);
  gate_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
  ++in_flight_;
}

void ChatClient::release_slot() {
  {
    std::lock_guard lock(gate_mutex_);
    --in_flight_;
  }
  gate_cv_.notify_one();
}

void ChatClient::record(const ChatRequest& request, const std::string& completion, bool cache_hit) {
  if (!options_.record_transcripts) return;
  std::lock_guard lock(transcript_mutex_);
  transcripts_.push_back({request, completion, cache_hit});
}

std::vector<RecordedCall> ChatClient::transcripts() const {
  std::lock_guard lock(transcript_mutex_);
  return transcripts_;
}

void ChatClient::clear_transcripts() {
  std::lock_guard lock(transcript_mutex_);
  transcripts_.clear();
}

std::string ChatClient::chat(const ModelSpec& spec, std::span<const ChatMessage> messages,
                             int replicate) {
  spec.validate();
  if (messages.empty()) throw Error(ErrorKind::kInvalidArgument, "messages is empty");
  if (messages.front().role == Role::kAssistant) {
    throw Error(ErrorKind::kInvalidArgument, "first message must be system or user");
  }
  for (const auto& m : messages) {
    if (is_blank(m.content)) throw Error(ErrorKind::kInvalidArgument, "message content is blank");
  }

  ChatRequest request{spec, std::vector<ChatMessage>(messages.begin(), messages.end()), replicate};
  CacheKey key = CacheKey::of(request);
  if (auto cached = cache_.get(key)) {
    record(request, *cached, true);
    return *cached;
  }

  auto provider = provider_for(spec.provider_id);
  acquire_slot();
  struct SlotGuard {
    ChatClient* self;
    ~SlotGuard() { self->release_slot(); }
  } guard{this};

  const int attempts = spec.max_retries + 1;
  std::string last_failure;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string text;
    try {
      ++provider_calls_;
      text = provider->complete(request);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTransientProviderError) throw;
      last_failure = e.what();
      if (attempt + 1 < attempts) options_.retry.sleep(options_.retry.delay_for(attempt));
      continue;
    }
    if (is_blank(text)) {
      throw Error(ErrorKind::kEmptyCompletion,
                  "provider '" + spec.provider_id + "' returned a blank completion");
    }
    cache_.put(key, request, text);
    record(request, text, false);
    return text;
  }
  throw Error(ErrorKind::kProviderError,
              "gave up after " + std::to_string(attempts) + " attempts: " + last_failure);
}

}  // namespace roleeval
