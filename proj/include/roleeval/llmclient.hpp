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

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace roleeval {

enum class Role { kSystem, kUser, kAssistant };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

inline ChatMessage system_message(std::string content) { return {Role::kSystem, std::move(content)}; }
inline ChatMessage user_message(std::string content) { return {Role::kUser, std::move(content)}; }
inline ChatMessage assistant_message(std::string content) {
  return {Role::kAssistant, std::move(content)};
}

struct ModelSpec {
  std::string provider_id;
  std::string model_id;
  double temperature = 0.0;  // [0, 2]
  double top_p = 1.0;        // (0, 1]
  int max_retries = 3;
  // Completion length cap forwarded to the provider; part of the cache key
  // only when set.
  std::optional<int> max_tokens;

  // Throws Error(kInvalidArgument) naming the violated range.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

// One provider request. `replicate` distinguishes deliberate repeats of an
// identical prompt (judge iterations) so they are not served from cache.
struct ChatRequest {
  ModelSpec spec;
  std::vector<ChatMessage> messages;
  int replicate = 0;
};

// SHA-256 over a length-prefixed canonical serialization of the request:
//
//   roleeval-chat-v1\n
//   provider:<len>:<provider_id>\n
//   model:<len>:<model_id>\n
//   temperature:<len>:<shortest round-trip decimal>\n
//   top_p:<len>:<shortest round-trip decimal>\n
//   [max_tokens:<len>:<n>\n]        only when set
//   [replicate:<len>:<n>\n]         only when non-zero
//   <role>:<len>:<content>\n        one line per message, in order
struct CacheKey {
  std::string digest;  // 64 lowercase hex characters

  static CacheKey of(const ModelSpec& spec, std::span<const ChatMessage> messages,
                     int replicate = 0);
  static CacheKey of(const ChatRequest& request) {
    return of(request.spec, request.messages, request.replicate);
  }
  static std::string canonical_form(const ModelSpec& spec, std::span<const ChatMessage> messages,
                                    int replicate = 0);

  auto operator<=>(const CacheKey&) const = default;
};

// Backend that turns a request into completion text. Implementations throw
// Error(kTransientProviderError) for retryable failures, kAuthError for
// credential problems and kProviderError for permanent failures.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Scripted provider: answers only requests whose CacheKey is in the script.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::map<CacheKey, std::string> script);
  std::string complete(const ChatRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<CacheKey, std::string> script_;
  std::atomic<std::size_t> calls_{0};
};

// Provider backed by a callable; used for fault injection and synthetic runs.
class FunctionProvider : public Provider {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;
  explicit FunctionProvider(Responder responder) : responder_(std::move(responder)) {}
  std::string complete(const ChatRequest& request) override {
    ++calls_;
    return responder_(request);
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  std::chrono::milliseconds initial_delay{1000};
  std::chrono::milliseconds max_delay{30000};
  // Injected so tests do not sleep; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  // Delay before retry number `retry` (0-based): initial * 2^retry, capped.
  std::chrono::milliseconds delay_for(int retry) const;
};

// Content-addressed completion cache. Memory-backed, optionally persisted as
// one JSON file per key (<dir>/<digest>.json).
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<std::string> get(const CacheKey& key) const;
  void put(const CacheKey& key, const ChatRequest& request, const std::string& completion);
  std::size_t size() const;

 private:
  std::mutex& writer_lock(const CacheKey& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<CacheKey, std::string> memory_;
  mutable std::array<std::mutex, 32> writer_locks_;
};

struct ClientOptions {
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;
  std::size_t max_in_flight = 8;
  bool record_transcripts = false;
};

struct RecordedCall {
  ChatRequest request;
  std::string completion;
  bool cache_hit = false;
};

// Every model call in the harness goes through this client.
class ChatClient {
 public:
  explicit ChatClient(ClientOptions options = {});

  void register_provider(const std::string& provider_id, std::shared_ptr<Provider> provider);

  // Routes `provider_id` to a scripted mock; unscripted keys raise MockMiss.
  std::shared_ptr<MockProvider> register_mock_provider(const std::string& provider_id,
                                                       std::map<CacheKey, std::string> script);

  bool has_provider(const std::string& provider_id) const;

  // Returns the completion for `messages`. Cache hits make no provider call.
  // Transient failures are retried up to spec.max_retries times.
  std::string chat(const ModelSpec& spec, std::span<const ChatMessage> messages,
                   int replicate = 0);

  std::size_t provider_calls() const { return provider_calls_.load(); }
  std::vector<RecordedCall> transcripts() const;
  void clear_transcripts();

 private:
  std::shared_ptr<Provider> provider_for(const std::string& provider_id) const;
  void record(const ChatRequest& request, const std::string& completion, bool cache_hit);
  void acquire_slot();
  void release_slot();

  ClientOptions options_;
  ResponseCache cache_;
  mutable std::shared_mutex providers_mutex_;
  std::map<std::string, std::shared_ptr<Provider>> providers_;
  std::atomic<std::size_t> provider_calls_{0};

  std::mutex gate_mutex_;
  std::condition_variable gate_cv_;
  std::size_t in_flight_ = 0;

  mutable std::mutex transcript_mutex_;
  std::vector<RecordedCall> transcripts_;
};

}  // namespace roleeval
