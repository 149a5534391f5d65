// Copyright 2026 The gopret Authors
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

#include <filesystem>
#include <string>
#include <vector>

namespace gopret {

struct DecodingOptions {
  double temperature = 0.0;  // deterministic decoding by default
  int max_tokens = 512;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string send(const std::string& prompt,
                           const DecodingOptions& decoding) = 0;
};

// Replays a fixed list of replies in order. Throws Error{InvalidInput}
// when the script runs dry. from_file loads one reply per JSON line
// ({"reply": "..."}), which doubles as the replay-from-file client.
class ScriptedLlmClient final : public LlmClient {
 public:
  explicit ScriptedLlmClient(std::vector<std::string> replies);
  static ScriptedLlmClient from_file(const std::filesystem::path& path);

  std::string send(const std::string& prompt,
                   const DecodingOptions& decoding) override;

  // Prompts seen so far, for assertions on what was actually sent.
  const std::vector<std::string>& prompts() const { return prompts_; }
  size_t calls() const { return prompts_.size(); }

 private:
  std::vector<std::string> replies_;
  std::vector<std::string> prompts_;
  size_t next_ = 0;
};

struct HttpLlmOptions {
  std::string endpoint;      // chat-style completion endpoint
  std::string model;
  std::string auth_env_var;  // env var holding the bearer token
  int timeout_seconds = 60;
  int max_retries = 2;
};

// POST {messages, temperature, max_tokens} -> {text}.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(HttpLlmOptions options);

  std::string send(const std::string& prompt,
                   const DecodingOptions& decoding) override;

 private:
  HttpLlmOptions options_;
};

}  // namespace gopret
