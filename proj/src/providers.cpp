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

#include "roleeval/providers.hpp"

#include <array>
#include <optional>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "roleeval/error.hpp"
#include "roleeval/rng.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

// --- HttpChatProvider --------------------------------------------------------

std::string HttpChatProvider::complete(const ChatRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || is_blank(key)) {
    throw Error(ErrorKind::kAuthError, "environment variable " + config_.api_key_env + " is not set");
  }

  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  nlohmann::json body = {{"model", request.spec.model_id},
                         {"messages", messages},
                         {"temperature", request.spec.temperature},
                         {"top_p", request.spec.top_p}};
  if (request.spec.max_tokens) body["max_tokens"] = *request.spec.max_tokens;

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_bearer_token_auth(key);
  auto res = client.Post(config_.path, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::kTransientProviderError,
                "request to " + config_.base_url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorKind::kAuthError, "provider rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorKind::kTransientProviderError, "HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kProviderError, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    auto reply = nlohmann::json::parse(res->body);
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kProviderError, std::string("malformed completion payload: ") + e.what());
  }
}

// --- SyntheticProvider -------------------------------------------------------

namespace {

constexpr std::array<const char*, 24> kOpeners = {
    "Honestly", "I think", "For me", "Well", "To be fair", "Probably", "I guess", "Hmm",
    "In my case", "Personally", "I'd say", "Not sure but", "Mostly", "Truth is",
    "Depends", "Usually", "If I'm honest", "Good question", "Right", "So",
    "Funny enough", "Back then", "These days", "Really"};
constexpr std::array<const char*, 40> kWords = {
    "friends", "work", "time", "music", "family", "weekend", "coffee", "travel", "books",
    "people", "small", "things", "matter", "learn", "slowly", "plan", "ahead", "tired",
    "happy", "calm", "city", "walk", "cook", "team", "trust", "listen", "change",
    "future", "honest", "simple", "problem", "fix", "careful", "messy", "laugh", "quiet",
    "school", "home", "money", "health"};

std::string sentence(SeededRng& rng, std::size_t words) {
  std::string out = kOpeners[rng.uniform_index(kOpeners.size())];
  for (std::size_t i = 0; i < words; ++i) {
    out += ' ';
    out += kWords[rng.uniform_index(kWords.size())];
  }
  out += '.';
  return out;
}

std::string paragraph(SeededRng& rng, std::size_t min_words, std::size_t max_words) {
  std::size_t target = min_words + rng.uniform_index(max_words - min_words + 1);
  std::string out;
  std::size_t written = 0;
  while (written < target) {
    std::size_t n = 4 + rng.uniform_index(8);
    if (!out.empty()) out += ' ';
    out += sentence(rng, n);
    written += n + 1;
  }
  return out;
}

std::optional<int> capture_int(const std::string& text, const std::regex& pattern) {
  std::smatch m;
  if (std::regex_search(text, m, pattern)) return std::stoi(m[1].str());
  return std::nullopt;
}

}  // namespace

std::string SyntheticProvider::complete(const ChatRequest& request) {
  const std::string digest = CacheKey::of(request).digest;
  SeededRng rng(std::stoull(digest.substr(0, 16), nullptr, 16));
  const std::string& first = request.messages.front().content;

  static const std::regex kJudgeLast(R"(from Question 0 to Question (\d+))");
  static const std::regex kNumbered(R"(Output exactly (\d+) lines numbered)");
  static const std::regex kCategory("category \"([^\"]+)\"");

  if (starts_with_icase(first, "You are participating in the Turing Test")) {
    int last = capture_int(first, kJudgeLast).value_or(9);
    std::ostringstream out;
    out << "Comparing tone and detail against the background.\nSELECTIONS:\n";
    for (int i = 0; i <= last; ++i) out << "Question " << i << ": Answer" << rng.coin() << "-" << i << "\n";
    return out.str();
  }
  for (const auto& m : request.messages) {
    if (auto count = capture_int(m.content, kNumbered)) {
      std::smatch cat;
      std::string category = std::regex_search(first, cat, kCategory) ? cat[1].str() : "general";
      std::ostringstream out;
      for (int i = 1; i <= *count; ++i) {
        out << i << ". About " << to_lower_ascii(category) << ", what would you do about "
            << kWords[rng.uniform_index(kWords.size())] << " and "
            << kWords[rng.uniform_index(kWords.size())] << " if you had to choose today?\n";
      }
      return out.str();
    }
  }
  if (starts_with_icase(first, "You are a character description model")) {
    return "The character's description is: the character is " + paragraph(rng, 12, 20);
  }
  if (starts_with_icase(first, "Please change the third person")) {
    std::string text = request.messages.back().content;
    const std::string prefix = "The character's description is:";
    if (starts_with_icase(text, prefix)) text = trim(text.substr(prefix.size()));
    text = std::regex_replace(text, std::regex("\\bthe character is\\b", std::regex::icase), "you are");
    text = std::regex_replace(text, std::regex("\\bthe character\\b", std::regex::icase), "you");
    return "Your description is: " + text;
  }
  if (starts_with_icase(first, "If you had the opportunity to meet")) {
    std::ostringstream out;
    for (int i = 1; i <= 10; ++i) {
      out << "Question " << i << ": What do you think about "
          << kWords[rng.uniform_index(kWords.size())] << "?\n"
          << "Factualness: High, it follows from the background.\n"
          << "Response: " << paragraph(rng, 10, 25) << "\n";
    }
    return out.str();
  }
  if (request.messages.size() == 1 && starts_with_icase(first, "From now on, you called")) {
    std::string name = "this person";
    std::size_t b = first.find("you called ");
    std::size_t e = first.find(" which is");
    if (b != std::string::npos && e != std::string::npos && e > b + 11) {
      name = first.substr(b + 11, e - b - 11);
    }
    return "I understand, I am " + name + " and I will answer every question as myself.";
  }
  return paragraph(rng, 20, 60);
}

std::shared_ptr<Provider> make_provider(const std::string& provider_id) {
  auto base_url = [](const char* env, const char* fallback) {
    const char* v = std::getenv(env);
    return std::string(v != nullptr && *v != '\0' ? v : fallback);
  };
  if (provider_id == "openai") {
    return std::make_shared<HttpChatProvider>(HttpProviderConfig{
        base_url("OPENAI_BASE_URL", "https://api.openai.com"), "/v1/chat/completions", "OPENAI_API_KEY"});
  }
  if (provider_id == "gemini") {
    return std::make_shared<HttpChatProvider>(
        HttpProviderConfig{base_url("GEMINI_BASE_URL", "https://generativelanguage.googleapis.com"),
                           "/v1beta/openai/chat/completions", "GEMINI_API_KEY"});
  }
  if (provider_id == "synthetic") return std::make_shared<SyntheticProvider>();
  throw Error(ErrorKind::kConfigError, "unknown provider '" + provider_id + "'");
}

}  // namespace roleeval
