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

#include <json.hpp>

namespace gopret {

// One config file drives every command; flags override file values, file
// values override the defaults below. validate() rejects out-of-range
// values before any work starts.
struct Config {
  // Corpus and artifacts.
  std::filesystem::path corpus_dir;
  std::filesystem::path workdir = "gopret-work";  // graph/index/params/traces
  std::filesystem::path prompts_dir = "prompts";

  // Chunking and keywords.
  int chunk_max_tokens = 200;
  std::string extractor = "deterministic";  // or "llm"

  // Embedding provider: "file" (vector file) or "http".
  std::string embed_provider = "file";
  std::filesystem::path embed_vectors_file;
  std::string embed_endpoint;
  std::string embed_auth_env_var = "GOPRET_EMBED_TOKEN";
  int embed_batch_size = 32;

  // Diffusion and training knobs.
  int relevant_k = 5;
  int competitive_o_gnn = 25;
  int competitive_o_rgnn = 10;
  double margin = 0.01;
  int layers = 1;
  double alpha_untrained = 0.5;
  double beta_untrained = 0.9;
  double alpha_init_gnn = 0.1;   // training initialization
  double alpha_init_rgnn = 1.0;
  double beta_init_rgnn = 1.0;
  double learning_rate = 1.0;
  double grad_stop_threshold = 0.001;
  int loss_patience = 5;
  int max_iterations = 200;

  // Answering.
  int token_budget = 3500;
  int max_steps = 5;
  double temperature = 0.0;
  int llm_max_tokens = 512;
  bool repeat_question = false;

  // LLM endpoint.
  std::string llm_endpoint;
  std::string llm_model;
  std::string llm_auth_env_var = "GOPRET_LLM_TOKEN";

  std::filesystem::path graph_path() const { return workdir / "graph.jsonl"; }
  std::filesystem::path index_path() const { return workdir / "index.jsonl"; }
  std::filesystem::path params_path() const { return workdir / "params.json"; }
  std::filesystem::path traces_dir() const { return workdir / "traces"; }
  std::filesystem::path passages_path() const { return workdir / "passages.jsonl"; }

  // Reads a JSON config file; unknown keys are rejected so typos fail
  // loudly. Environment overrides GOPRET_EMBED_ENDPOINT / GOPRET_LLM_ENDPOINT
  // are applied afterwards.
  static Config load(const std::filesystem::path& path);

  void apply_env_overrides();
  void validate() const;  // throws Error{Config}

  nlohmann::json to_json() const;
};

}  // namespace gopret
