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

#include <atomic>
#include <thread>

#include "roleeval/error.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/providers.hpp"
#include "test_support.hpp"

namespace roleeval {
namespace {

using ::testing::ElementsAre;

ModelSpec spec(double temperature = 0.0) {
  ModelSpec s;
  s.provider_id = "mock";
  s.model_id = "gpt-4";
  s.temperature = temperature;
  return s;
}

ClientOptions no_sleep(std::vector<std::chrono::milliseconds>* delays = nullptr) {
  ClientOptions o;
  o.retry.sleep = [delays](std::chrono::milliseconds d) {
    if (delays) delays->push_back(d);
  };
  return o;
}

const std::vector<ChatMessage> kMessages = {system_message("sys"), user_message("hello")};

TEST(CacheKey, DigestMatchesHandComputedSha256) {
  // sha256 of the canonical form, computed with Python hashlib.
  EXPECT_EQ(CacheKey::canonical_form(spec(), kMessages),
            "roleeval-chat-v1\nprovider:4:mock\nmodel:5:gpt-4\ntemperature:1:0\ntop_p:1:1\n"
            "system:3:sys\nuser:5:hello\n");
  EXPECT_EQ(CacheKey::of(spec(), kMessages).digest,
            "4b459fa883f1af2418e0a9ccb193f90b0c185eb0dcbc8094e3b89b977ce5bcbf");

  ModelSpec s = spec(0.7);
  s.top_p = 0.95;
  s.max_tokens = 256;
  std::vector<ChatMessage> one = {user_message("hello")};
  EXPECT_EQ(CacheKey::of(s, one, 2).digest, "19d1301ee4b12926cb7ac6ba1300bb67138682210e67f2011c4d2b9a791e3da4");
}

TEST(CacheKey, SensitiveToEveryField) {
  auto base = CacheKey::of(spec(), kMessages);
  EXPECT_NE(base, CacheKey::of(spec(0.1), kMessages));
  EXPECT_NE(base, CacheKey::of(spec(), kMessages, 1));
  std::vector<ChatMessage> swapped = {user_message("sys"), user_message("hello")};
  EXPECT_NE(base, CacheKey::of(spec(), swapped));
  ModelSpec other = spec();
  other.model_id = "gpt-4-turbo";
  EXPECT_NE(base, CacheKey::of(other, kMessages));
}

TEST(ModelSpec, ValidatesRanges) {
  ModelSpec s = spec(2.5);
  EXPECT_THROW(s.validate(), Error);
  s = spec();
  s.top_p = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = spec();
  s.max_retries = -1;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_NO_THROW(spec(0.7).validate());
}

TEST(MockProvider, EmptyScriptMisses) {
  ChatClient client(no_sleep());
  client.register_mock_provider("mock", {});
  try {
    client.chat(spec(), kMessages);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMockMiss);
  }
}

TEST(MockProvider, ScriptedHitAndTemperatureMiss) {
  ChatClient client(no_sleep());
  auto mock = client.register_mock_provider("mock", {{CacheKey::of(spec(), kMessages), "scripted"}});
  EXPECT_EQ(client.chat(spec(), kMessages), "scripted");
  // Same messages at another temperature hash to a different key.
  try {
    client.chat(spec(0.5), kMessages);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMockMiss);
    EXPECT_THAT(e.details(), ElementsAre(CacheKey::of(spec(0.5), kMessages).digest));
  }
  EXPECT_EQ(mock->calls(), 2u);
}

TEST(ChatClient, SecondCallServedFromCache) {
  ClientOptions o = no_sleep();
  o.record_transcripts = true;
  ChatClient client(o);
  auto provider = std::make_shared<FunctionProvider>([](const ChatRequest&) { return std::string("same"); });
  client.register_provider("mock", provider);
  EXPECT_EQ(client.chat(spec(), kMessages), "same");
  EXPECT_EQ(client.chat(spec(), kMessages), "same");
  EXPECT_EQ(provider->calls(), 1u);
  auto t = client.transcripts();
  ASSERT_EQ(t.size(), 2u);
  EXPECT_FALSE(t[0].cache_hit);
  EXPECT_TRUE(t[1].cache_hit);
}

TEST(ChatClient, ReplicatesBypassEachOther) {
  ChatClient client(no_sleep());
  auto provider = std::make_shared<FunctionProvider>([](const ChatRequest& r) { return std::to_string(r.replicate); });
  client.register_provider("mock", provider);
  EXPECT_EQ(client.chat(spec(), kMessages, 0), "0");
  EXPECT_EQ(client.chat(spec(), kMessages, 1), "1");
  EXPECT_EQ(provider->calls(), 2u);
}

TEST(ChatClient, TwoTransientFailuresThenSuccess) {
  std::vector<std::chrono::milliseconds> delays;
  ChatClient client(no_sleep(&delays));
  int attempts = 0;
  client.register_provider("mock", std::make_shared<FunctionProvider>([&](const ChatRequest&) -> std::string {
                             if (++attempts <= 2) throw Error(ErrorKind::kTransientProviderError, "503");
                             return "ok";
                           }));
  ModelSpec s = spec();
  s.max_retries = 3;
  EXPECT_EQ(client.chat(s, kMessages), "ok");
  EXPECT_EQ(attempts, 3);
  EXPECT_THAT(delays, ElementsAre(std::chrono::milliseconds(1000), std::chrono::milliseconds(2000)));
}

TEST(ChatClient, AlwaysFailingGivesProviderErrorAfterRetriesPlusOne) {
  ChatClient client(no_sleep());
  int attempts = 0;
  client.register_provider("mock", std::make_shared<FunctionProvider>([&](const ChatRequest&) -> std::string {
                             ++attempts;
                             throw Error(ErrorKind::kTransientProviderError, "429");
                           }));
  ModelSpec s = spec();
  s.max_retries = 2;
  try {
    client.chat(s, kMessages);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProviderError);
  }
  EXPECT_EQ(attempts, 3);
}

TEST(ChatClient, AuthErrorIsNotRetried) {
  ChatClient client(no_sleep());
  int attempts = 0;
  client.register_provider("mock", std::make_shared<FunctionProvider>([&](const ChatRequest&) -> std::string {
                             ++attempts;
                             throw Error(ErrorKind::kAuthError, "401");
                           }));
  EXPECT_THROW(client.chat(spec(), kMessages), Error);
  EXPECT_EQ(attempts, 1);
}

TEST(ChatClient, BlankCompletionIsEmptyCompletion) {
  ChatClient client(no_sleep());
  client.register_mock_provider("mock", {{CacheKey::of(spec(), kMessages), "  \n"}});
  try {
    client.chat(spec(), kMessages);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyCompletion);
  }
}

TEST(ChatClient, UnknownProviderAndEmptyMessages) {
  ChatClient client(no_sleep());
  EXPECT_THROW(client.chat(spec(), kMessages), Error);
  client.register_mock_provider("mock", {});
  EXPECT_THROW(client.chat(spec(), std::vector<ChatMessage>{}), Error);
}

TEST(RetryPolicy, DoublesAndCaps) {
  RetryPolicy p;
  EXPECT_EQ(p.delay_for(0), std::chrono::milliseconds(1000));
  EXPECT_EQ(p.delay_for(3), std::chrono::milliseconds(8000));
  EXPECT_EQ(p.delay_for(10), std::chrono::milliseconds(30000));
}

TEST(ResponseCache, PersistsAcrossClients) {
  testing::TempDir dir;
  ClientOptions o = no_sleep();
  o.cache_dir = dir.path();
  {
    ChatClient client(o);
    client.register_provider("mock", std::make_shared<FunctionProvider>([](const ChatRequest&) { return std::string("stored"); }));
    EXPECT_EQ(client.chat(spec(), kMessages), "stored");
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / (CacheKey::of(spec(), kMessages).digest + ".json")));
  ChatClient fresh(o);
  fresh.register_mock_provider("mock", {});
  EXPECT_EQ(fresh.chat(spec(), kMessages), "stored");
}

TEST(ChatClient, InFlightLimitIsRespected) {
  ClientOptions o = no_sleep();
  o.max_in_flight = 2;
  ChatClient client(o);
  std::atomic<int> current{0}, peak{0};
  client.register_provider("mock", std::make_shared<FunctionProvider>([&](const ChatRequest& r) {
                             int now = ++current;
                             int prev = peak.load();
                             while (now > prev && !peak.compare_exchange_weak(prev, now)) {
                             }
                             std::this_thread::sleep_for(std::chrono::milliseconds(5));
                             --current;
                             return r.messages.back().content;
                           }));
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      std::vector<ChatMessage> m = {user_message("q" + std::to_string(i))};
      EXPECT_EQ(client.chat(spec(), m), "q" + std::to_string(i));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_EQ(client.provider_calls(), 8u);
}

TEST(SyntheticProvider, DeterministicPerKey) {
  SyntheticProvider p;
  ChatRequest r{spec(), kMessages, 0};
  EXPECT_EQ(p.complete(r), p.complete(r));
  ChatRequest other{spec(), {user_message("something else")}, 0};
  EXPECT_NE(p.complete(r), p.complete(other));
}

TEST(Providers, UnknownIdIsConfigError) {
  try {
    make_provider("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfigError);
  }
}

}  // namespace
}  // namespace roleeval
