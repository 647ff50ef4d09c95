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

#include <memory>
#include <string>

#include "roleeval/llmclient.hpp"

namespace roleeval {

// OpenAI-compatible chat-completions endpoint. The API key is read from the
// environment at call time; a missing key raises Error(kAuthError).
struct HttpProviderConfig {
  std::string base_url;       // "https://api.openai.com"
  std::string path;           // "/v1/chat/completions"
  std::string api_key_env;    // "OPENAI_API_KEY"
  int timeout_seconds = 120;
};

class HttpChatProvider : public Provider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  HttpProviderConfig config_;
};

// Offline provider producing deterministic, plausibly shaped completions for
// every prompt the harness sends (question lists, persona construction,
// persona answers, judge selection blocks). Output depends only on the
// request's CacheKey.
class SyntheticProvider : public Provider {
 public:
  std::string complete(const ChatRequest& request) override;
};

// "openai", "gemini" or "synthetic".
std::shared_ptr<Provider> make_provider(const std::string& provider_id);

}  // namespace roleeval
