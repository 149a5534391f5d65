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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gopret/embedding.hpp"
#include "gopret/gnn.hpp"
#include "gopret/llm.hpp"

namespace gopret {

// The six editable template files. Placeholders: {question}, {context},
// {trace}, {examples}. load() checks that each template carries the
// placeholders its operation fills.
struct PromptTemplates {
  std::string direct_qa;
  std::string retrieval_qa;
  std::string next_subquestion;
  std::string subanswer;
  std::string self_critique;
  std::string final_answer;
  std::string subquestion_examples;  // demonstrations injected via {examples}

  static PromptTemplates load(const std::filesystem::path& dir);

  // Combined content hash, stamped into every trace.
  std::string checksum() const;
};

std::string fill_template(std::string templ,
                          const std::vector<std::pair<std::string, std::string>>& slots);

enum class CritiqueVerdict { kYes, kNo };

struct ReasoningStep {
  std::string subquestion;
  std::vector<int> retrieved_ids;
  std::string subanswer;
  CritiqueVerdict critique = CritiqueVerdict::kNo;
  std::vector<double> h_hat;  // recurrent state after this step
};

struct ReasoningTrace {
  std::string question;
  std::vector<ReasoningStep> steps;
  std::string final_answer;
  std::string termination_reason;  // "critique-yes" | "max-steps" | "error"
  std::string error;               // set when the loop aborted early
  std::vector<std::string> warnings;
  std::string prompt_checksum;
  nlohmann::json config_snapshot;

  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;
};

struct MultiHopOptions {
  int max_steps = 5;
  int token_budget = 3500;
  int relevant_k = 5;
  bool repeat_question = false;  // repeat the question after a long context
  DecodingOptions decoding;
};

// Single-shot answering: diffuse the query's distance field, retrieve
// under the budget, fill the retrieval template, ask once. An empty
// retrieval proceeds with empty context and records a warning.
struct SingleShotAnswer {
  std::string answer;
  RetrievalResult retrieval;
  std::vector<std::string> warnings;
};

SingleShotAnswer answer_single(const std::string& question,
                               const GraphOfPassages& g,
                               EmbeddingProvider& provider,
                               const EmbeddingIndex& index,
                               const GnnParams& params, LlmClient& llm,
                               const PromptTemplates& templates,
                               const MultiHopOptions& options);

// Returns the text after the reply's final "Next step:" marker. A reply
// without the marker gets one retry; a second failure throws
// Error{LlmFormat}.
std::string generate_subquestion(LlmClient& llm, const PromptTemplates& templates,
                                 const std::string& question,
                                 const std::vector<ReasoningStep>& steps,
                                 const DecodingOptions& decoding);

std::string answer_subquestion(LlmClient& llm, const PromptTemplates& templates,
                               const std::string& subquestion,
                               const std::vector<std::string>& passages,
                               bool repeat_question,
                               const DecodingOptions& decoding);

// Scans the reply case-insensitively for "critique: yes" / "critique: no".
// Yes wins when both appear; a reply with neither counts as no, so a
// garbled critique keeps the loop reasoning rather than ending it early.
CritiqueVerdict self_critique(LlmClient& llm, const PromptTemplates& templates,
                              const std::string& question,
                              const std::vector<ReasoningStep>& steps,
                              const DecodingOptions& decoding);

// The multi-hop loop: subquestion -> distance field -> diffusion ->
// recurrent mix with the previous step's state -> retrieval -> subanswer
// -> self-critique. Ends on a yes verdict or at max_steps, then fills the
// final-answer template over the trace. An unrecoverable LLM failure
// returns the partial trace with an error status instead of throwing.
ReasoningTrace run_rgnn_ret(const std::string& question,
                            const GraphOfPassages& g,
                            EmbeddingProvider& provider,
                            const EmbeddingIndex& index,
                            const GnnParams& params, LlmClient& llm,
                            const PromptTemplates& templates,
                            const MultiHopOptions& options);

}  // namespace gopret
