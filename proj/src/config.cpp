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

#include "gopret/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "gopret/error.hpp"

namespace gopret {

namespace {

const std::set<std::string> kKnownKeys = {
    "corpus_dir", "workdir", "prompts_dir", "chunk_max_tokens", "extractor",
    "embed_provider", "embed_vectors_file", "embed_endpoint", "embed_auth_env_var",
    "embed_batch_size", "relevant_k", "competitive_o_gnn", "competitive_o_rgnn",
    "margin", "layers", "alpha_untrained", "beta_untrained", "alpha_init_gnn",
    "alpha_init_rgnn", "beta_init_rgnn", "learning_rate", "grad_stop_threshold",
    "loss_patience", "max_iterations", "token_budget", "max_steps", "temperature",
    "llm_max_tokens", "repeat_question", "llm_endpoint", "llm_model",
    "llm_auth_env_var",
};

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_path_if(const nlohmann::json& j, const char* key, std::filesystem::path& out) {
  if (j.contains(key)) out = j.at(key).get<std::string>();
}

void check_unit(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::Config,
                std::string(name) + " must lie in [0,1], got " + std::to_string(value));
  }
}

void check_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw Error(ErrorCode::Config, std::string(name) + " must be positive");
  }
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::Format, path.string() + ": config must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) {
      throw Error(ErrorCode::Config, path.string() + ": unknown config key \"" + key + "\"");
    }
  }

  Config c;
  read_path_if(j, "corpus_dir", c.corpus_dir);
  read_path_if(j, "workdir", c.workdir);
  read_path_if(j, "prompts_dir", c.prompts_dir);
  read_if(j, "chunk_max_tokens", c.chunk_max_tokens);
  read_if(j, "extractor", c.extractor);
  read_if(j, "embed_provider", c.embed_provider);
  read_path_if(j, "embed_vectors_file", c.embed_vectors_file);
  read_if(j, "embed_endpoint", c.embed_endpoint);
  read_if(j, "embed_auth_env_var", c.embed_auth_env_var);
  read_if(j, "embed_batch_size", c.embed_batch_size);
  read_if(j, "relevant_k", c.relevant_k);
  read_if(j, "competitive_o_gnn", c.competitive_o_gnn);
  read_if(j, "competitive_o_rgnn", c.competitive_o_rgnn);
  read_if(j, "margin", c.margin);
  read_if(j, "layers", c.layers);
  read_if(j, "alpha_untrained", c.alpha_untrained);
  read_if(j, "beta_untrained", c.beta_untrained);
  read_if(j, "alpha_init_gnn", c.alpha_init_gnn);
  read_if(j, "alpha_init_rgnn", c.alpha_init_rgnn);
  read_if(j, "beta_init_rgnn", c.beta_init_rgnn);
  read_if(j, "learning_rate", c.learning_rate);
  read_if(j, "grad_stop_threshold", c.grad_stop_threshold);
  read_if(j, "loss_patience", c.loss_patience);
  read_if(j, "max_iterations", c.max_iterations);
  read_if(j, "token_budget", c.token_budget);
  read_if(j, "max_steps", c.max_steps);
  read_if(j, "temperature", c.temperature);
  read_if(j, "llm_max_tokens", c.llm_max_tokens);
  read_if(j, "repeat_question", c.repeat_question);
  read_if(j, "llm_endpoint", c.llm_endpoint);
  read_if(j, "llm_model", c.llm_model);
  read_if(j, "llm_auth_env_var", c.llm_auth_env_var);

  c.apply_env_overrides();
  return c;
}

void Config::apply_env_overrides() {
  if (const char* v = std::getenv("GOPRET_EMBED_ENDPOINT")) embed_endpoint = v;
  if (const char* v = std::getenv("GOPRET_LLM_ENDPOINT")) llm_endpoint = v;
}

void Config::validate() const {
  if (chunk_max_tokens < 1) throw Error(ErrorCode::Config, "chunk_max_tokens must be >= 1");
  if (extractor != "deterministic" && extractor != "llm") {
    throw Error(ErrorCode::Config, "extractor must be \"deterministic\" or \"llm\"");
  }
  if (embed_provider != "file" && embed_provider != "http") {
    throw Error(ErrorCode::Config, "embed_provider must be \"file\" or \"http\"");
  }
  if (embed_batch_size < 1) throw Error(ErrorCode::Config, "embed_batch_size must be >= 1");
  if (relevant_k < 1) throw Error(ErrorCode::Config, "relevant_k must be >= 1");
  if (competitive_o_gnn < 1 || competitive_o_rgnn < 1) {
    throw Error(ErrorCode::Config, "competitive set sizes must be >= 1");
  }
  check_positive(margin, "margin");
  if (layers < 1) throw Error(ErrorCode::Config, "layers must be >= 1");
  check_unit(alpha_untrained, "alpha_untrained");
  check_unit(beta_untrained, "beta_untrained");
  check_unit(alpha_init_gnn, "alpha_init_gnn");
  check_unit(alpha_init_rgnn, "alpha_init_rgnn");
  check_unit(beta_init_rgnn, "beta_init_rgnn");
  check_positive(learning_rate, "learning_rate");
  check_positive(grad_stop_threshold, "grad_stop_threshold");
  if (loss_patience < 1) throw Error(ErrorCode::Config, "loss_patience must be >= 1");
  if (max_iterations < 1) throw Error(ErrorCode::Config, "max_iterations must be >= 1");
  if (token_budget < 1) throw Error(ErrorCode::Config, "token_budget must be >= 1");
  if (max_steps < 1) throw Error(ErrorCode::Config, "max_steps must be >= 1");
  if (temperature < 0.0) throw Error(ErrorCode::Config, "temperature must be >= 0");
  if (llm_max_tokens < 1) throw Error(ErrorCode::Config, "llm_max_tokens must be >= 1");
}

nlohmann::json Config::to_json() const {
  return {
      {"corpus_dir", corpus_dir.string()},
      {"workdir", workdir.string()},
      {"prompts_dir", prompts_dir.string()},
      {"chunk_max_tokens", chunk_max_tokens},
      {"extractor", extractor},
      {"embed_provider", embed_provider},
      {"embed_vectors_file", embed_vectors_file.string()},
      {"embed_endpoint", embed_endpoint},
      {"embed_auth_env_var", embed_auth_env_var},
      {"embed_batch_size", embed_batch_size},
      {"relevant_k", relevant_k},
      {"competitive_o_gnn", competitive_o_gnn},
      {"competitive_o_rgnn", competitive_o_rgnn},
      {"margin", margin},
      {"layers", layers},
      {"alpha_untrained", alpha_untrained},
      {"beta_untrained", beta_untrained},
      {"alpha_init_gnn", alpha_init_gnn},
      {"alpha_init_rgnn", alpha_init_rgnn},
      {"beta_init_rgnn", beta_init_rgnn},
      {"learning_rate", learning_rate},
      {"grad_stop_threshold", grad_stop_threshold},
      {"loss_patience", loss_patience},
      {"max_iterations", max_iterations},
      {"token_budget", token_budget},
      {"max_steps", max_steps},
      {"temperature", temperature},
      {"llm_max_tokens", llm_max_tokens},
      {"repeat_question", repeat_question},
      {"llm_endpoint", llm_endpoint},
      {"llm_model", llm_model},
      {"llm_auth_env_var", llm_auth_env_var},
  };
}

}  // namespace gopret
