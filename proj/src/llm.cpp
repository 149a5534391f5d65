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

#include "gopret/llm.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "gopret/error.hpp"
#include "gopret/jsonl.hpp"

namespace gopret {

ScriptedLlmClient::ScriptedLlmClient(std::vector<std::string> replies)
    : replies_(std::move(replies)) {}

ScriptedLlmClient ScriptedLlmClient::from_file(const std::filesystem::path& path) {
  std::vector<std::string> replies;
  read_jsonl(path, [&](const nlohmann::json& r, size_t line) {
    if (!r.contains("reply") || !r["reply"].is_string()) {
      throw Error(ErrorCode::Format, path.string() + ": record at line " +
                                         std::to_string(line) +
                                         " lacks a string \"reply\" field");
    }
    replies.push_back(r["reply"].get<std::string>());
  });
  return ScriptedLlmClient(std::move(replies));
}

std::string ScriptedLlmClient::send(const std::string& prompt,
                                    const DecodingOptions& /*decoding*/) {
  prompts_.push_back(prompt);
  if (next_ >= replies_.size()) {
    throw Error(ErrorCode::InvalidInput,
                "scripted LLM exhausted after " + std::to_string(replies_.size()) +
                    " replies");
  }
  return replies_[next_++];
}

namespace {

// Splits "http://host:port/path" for httplib. Throws Error{Config} on
// anything that does not look like an HTTP endpoint.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::Config, "endpoint must start with http:// or https://");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::string auth_token(const std::string& env_var) {
  if (env_var.empty()) return {};
  const char* value = std::getenv(env_var.c_str());
  return value ? value : "";
}

}  // namespace

HttpLlmClient::HttpLlmClient(HttpLlmOptions options) : options_(std::move(options)) {}

std::string HttpLlmClient::send(const std::string& prompt,
                                const DecodingOptions& decoding) {
  const auto [base, path] = split_endpoint(options_.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  const std::string token = auth_token(options_.auth_env_var);
  if (!token.empty()) client.set_bearer_token_auth(token);

  nlohmann::json body = {
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", decoding.temperature},
      {"max_tokens", decoding.max_tokens},
  };
  if (!options_.model.empty()) body["model"] = options_.model;

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
      last_error = "no response from " + options_.endpoint;
      continue;
    }
    if (res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::Transport,
                  "LLM endpoint returned status " + std::to_string(res->status));
    }
    auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text") || !reply["text"].is_string()) {
      throw Error(ErrorCode::Format, "LLM endpoint returned a non-{text} body");
    }
    return reply["text"].get<std::string>();
  }
  throw TransportError("LLM request failed after retries: " + last_error);
}

}  // namespace gopret
