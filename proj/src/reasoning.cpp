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

#include "gopret/reasoning.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "gopret/error.hpp"
#include "gopret/hash.hpp"
#include "gopret/training.hpp"

namespace gopret {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_placeholders(const std::string& templ, const std::string& name,
                          const std::vector<std::string>& placeholders) {
  for (const auto& p : placeholders) {
    if (templ.find("{" + p + "}") == std::string::npos) {
      throw Error(ErrorCode::Config,
                  "template " + name + " is missing placeholder {" + p + "}");
    }
  }
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// "Next step: <q>\nIntermediate answer: <a>" lines, the running transcript
// the subquestion and critique prompts see.
std::string render_steps(const std::vector<ReasoningStep>& steps) {
  std::string out;
  for (const auto& step : steps) {
    out += "Next step: " + step.subquestion + "\n";
    out += "Intermediate answer: " + step.subanswer + "\n";
  }
  return out;
}

std::string render_context(const std::vector<int>& ids, const GraphOfPassages& g) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    out += "(" + std::to_string(i + 1) + ") " + g.passage(ids[i]).text;
    if (i + 1 < ids.size()) out += "\n";
  }
  return out;
}

}  // namespace

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.direct_qa = read_file(dir / "direct_qa.txt");
  t.retrieval_qa = read_file(dir / "retrieval_qa.txt");
  t.next_subquestion = read_file(dir / "next_subquestion.txt");
  t.subanswer = read_file(dir / "subanswer.txt");
  t.self_critique = read_file(dir / "self_critique.txt");
  t.final_answer = read_file(dir / "final_answer.txt");
  t.subquestion_examples = read_file(dir / "subquestion_examples.txt");

  require_placeholders(t.direct_qa, "direct_qa", {"question"});
  require_placeholders(t.retrieval_qa, "retrieval_qa", {"context", "question"});
  require_placeholders(t.next_subquestion, "next_subquestion",
                       {"examples", "question", "trace"});
  require_placeholders(t.subanswer, "subanswer", {"context", "question"});
  require_placeholders(t.self_critique, "self_critique", {"question", "trace"});
  require_placeholders(t.final_answer, "final_answer", {"trace", "question"});
  return t;
}

std::string PromptTemplates::checksum() const {
  std::string all;
  for (const std::string* part :
       {&direct_qa, &retrieval_qa, &next_subquestion, &subanswer, &self_critique,
        &final_answer, &subquestion_examples}) {
    all += *part;
    all.push_back('\x1e');
  }
  return content_hash(all);
}

std::string fill_template(
    std::string templ,
    const std::vector<std::pair<std::string, std::string>>& slots) {
  for (const auto& [name, value] : slots) {
    const std::string needle = "{" + name + "}";
    size_t pos = 0;
    while ((pos = templ.find(needle, pos)) != std::string::npos) {
      templ.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return templ;
}

nlohmann::json ReasoningTrace::to_json() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& step : steps) {
    steps_json.push_back({
        {"subquestion", step.subquestion},
        {"retrieved_ids", step.retrieved_ids},
        {"subanswer", step.subanswer},
        {"critique", step.critique == CritiqueVerdict::kYes ? "yes" : "no"},
        {"h_hat", step.h_hat},
    });
  }
  nlohmann::json j = {
      {"question", question},
      {"steps", steps_json},
      {"final_answer", final_answer},
      {"termination_reason", termination_reason},
      {"warnings", warnings},
      {"prompt_checksum", prompt_checksum},
      {"config", config_snapshot},
  };
  if (!error.empty()) j["error"] = error;
  return j;
}

void ReasoningTrace::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write trace " + path.string());
  out << to_json().dump(2) << '\n';
}

SingleShotAnswer answer_single(const std::string& question, const GraphOfPassages& g,
                               EmbeddingProvider& provider, const EmbeddingIndex& index,
                               const GnnParams& params, LlmClient& llm,
                               const PromptTemplates& templates,
                               const MultiHopOptions& options) {
  SingleShotAnswer result;
  const DistanceField field = distance_field(question, provider, index, g);
  const auto h_final = integrate(g, field.h0, params, options.relevant_k);
  result.retrieval = rank_and_retrieve(h_final, g, options.token_budget);
  if (result.retrieval.selected_ids.empty()) {
    result.warnings.push_back("retrieval selected no passages; answering with empty context");
  }

  std::string context = render_context(result.retrieval.selected_ids, g);
  if (options.repeat_question && !context.empty()) {
    context = question + "\n\n" + context;
  }
  const std::string prompt = fill_template(
      templates.retrieval_qa, {{"context", context}, {"question", question}});
  result.answer = llm.send(prompt, options.decoding);
  return result;
}

std::string generate_subquestion(LlmClient& llm, const PromptTemplates& templates,
                                 const std::string& question,
                                 const std::vector<ReasoningStep>& steps,
                                 const DecodingOptions& decoding) {
  const std::string prompt = fill_template(
      templates.next_subquestion, {{"examples", templates.subquestion_examples},
                                   {"question", question},
                                   {"trace", render_steps(steps)}});
  static constexpr std::string_view kMarker = "next step:";
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string reply = llm.send(prompt, decoding);
    const std::string lowered = lowercase(reply);
    const size_t at = lowered.rfind(kMarker);
    if (at == std::string::npos) continue;
    std::string_view after = std::string_view(reply).substr(at + kMarker.size());
    if (const size_t nl = after.find('\n'); nl != std::string_view::npos) {
      after = after.substr(0, nl);
    }
    const std::string subquestion = trim(after);
    if (!subquestion.empty()) return subquestion;
  }
  throw Error(ErrorCode::LlmFormat,
              "no usable \"Next step:\" marker in two subquestion replies");
}

std::string answer_subquestion(LlmClient& llm, const PromptTemplates& templates,
                               const std::string& subquestion,
                               const std::vector<std::string>& passages,
                               bool repeat_question, const DecodingOptions& decoding) {
  std::string context;
  for (size_t i = 0; i < passages.size(); ++i) {
    context += "(" + std::to_string(i + 1) + ") " + passages[i];
    if (i + 1 < passages.size()) context += "\n";
  }
  if (repeat_question && !context.empty()) {
    context = subquestion + "\n\n" + context;
  }
  const std::string prompt = fill_template(
      templates.subanswer, {{"context", context}, {"question", subquestion}});
  return llm.send(prompt, decoding);
}

CritiqueVerdict self_critique(LlmClient& llm, const PromptTemplates& templates,
                              const std::string& question,
                              const std::vector<ReasoningStep>& steps,
                              const DecodingOptions& decoding) {
  const std::string prompt = fill_template(
      templates.self_critique,
      {{"question", question}, {"trace", render_steps(steps)}});
  const std::string reply = lowercase(llm.send(prompt, decoding));
  if (reply.find("critique: yes") != std::string::npos) return CritiqueVerdict::kYes;
  return CritiqueVerdict::kNo;
}

ReasoningTrace run_rgnn_ret(const std::string& question, const GraphOfPassages& g,
                            EmbeddingProvider& provider, const EmbeddingIndex& index,
                            const GnnParams& params, LlmClient& llm,
                            const PromptTemplates& templates,
                            const MultiHopOptions& options) {
  if (options.max_steps < 1) {
    throw Error(ErrorCode::InvalidInput, "max_steps must be >= 1");
  }
  params.validate();

  ReasoningTrace trace;
  trace.question = question;
  trace.prompt_checksum = templates.checksum();
  trace.config_snapshot = {
      {"alphas", params.alphas},
      {"beta", params.beta},
      {"relevant_k", options.relevant_k},
      {"token_budget", options.token_budget},
      {"max_steps", options.max_steps},
      {"repeat_question", options.repeat_question},
      {"temperature", options.decoding.temperature},
      {"llm_max_tokens", options.decoding.max_tokens},
  };

  std::vector<double> h_hat_prev;
  try {
    for (int t = 1; t <= options.max_steps; ++t) {
      ReasoningStep step;
      step.subquestion =
          generate_subquestion(llm, templates, question, trace.steps, options.decoding);

      const DistanceField field = distance_field(step.subquestion, provider, index, g);
      const auto h_final = integrate(g, field.h0, params, options.relevant_k);
      if (t == 1) {
        step.h_hat = h_final;
      } else {
        step.h_hat.resize(h_final.size());
        for (size_t i = 0; i < h_final.size(); ++i) {
          step.h_hat[i] = params.beta * h_final[i] + (1.0 - params.beta) * h_hat_prev[i];
        }
      }

      const RetrievalResult retrieval =
          rank_and_retrieve(step.h_hat, g, options.token_budget);
      step.retrieved_ids = retrieval.selected_ids;
      if (step.retrieved_ids.empty()) {
        trace.warnings.push_back("step " + std::to_string(t) +
                                 " retrieved no passages under the token budget");
      }
      std::vector<std::string> texts;
      texts.reserve(step.retrieved_ids.size());
      for (int id : step.retrieved_ids) texts.push_back(g.passage(id).text);
      step.subanswer = answer_subquestion(llm, templates, step.subquestion, texts,
                                          options.repeat_question, options.decoding);

      h_hat_prev = step.h_hat;
      trace.steps.push_back(std::move(step));
      trace.steps.back().critique =
          self_critique(llm, templates, question, trace.steps, options.decoding);

      if (trace.steps.back().critique == CritiqueVerdict::kYes) {
        trace.termination_reason = "critique-yes";
        break;
      }
      if (t == options.max_steps) {
        trace.termination_reason = "max-steps";
      }
    }

    const std::string prompt = fill_template(
        templates.final_answer,
        {{"trace", render_steps(trace.steps)}, {"question", question}});
    trace.final_answer = llm.send(prompt, options.decoding);
  } catch (const Error& e) {
    trace.termination_reason = "error";
    trace.error = std::string(e.code_name()) + ": " + e.what();
  }
  return trace;
}

}  // namespace gopret
