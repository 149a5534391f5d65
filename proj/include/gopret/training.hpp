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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gopret/gnn.hpp"

namespace gopret {

struct TrainingExampleGnn {
  std::string question;
  std::vector<int> gold;      // supporting passage ids, nonempty
  std::vector<double> h0;     // precomputed raw distances
};

struct TrainingExampleRgnn {
  std::string question;
  std::vector<std::string> subquestions;        // q^1..q^T
  std::vector<std::vector<double>> step_h0;     // one field per step
  std::vector<int> gold;
};

struct HingeConfig {
  double margin = 0.01;            // r
  int relevant_k = 5;              // K
  int competitive_o = 25;          // O (10 for the recurrent objective)
  double learning_rate = 1.0;
  double grad_stop_threshold = 0.001;
  int loss_patience = 5;           // consecutive rising losses before stop
  int max_iterations = 200;
};

struct GradientReport {
  std::vector<double> d_alpha;
  double d_beta = 0.0;
  double loss = 0.0;
};

struct CompetitiveSets {
  std::vector<int> competitive;  // top-O smallest, ascending id
  std::vector<int> non_target;   // competitive minus gold, ascending id
};

// Top-O smallest final distances (ties to the lower id) and the non-target
// remainder. Throws Error{DegenerateExample} when every competitive node
// is gold; callers skip such examples with a warning.
CompetitiveSets competitive_sets(const std::vector<double>& h_final,
                                 const std::vector<int>& gold, int competitive_o);

// max(0, r + mean(h[gold]) - mean(h[non-target])).
double hinge_loss_gnn(const std::vector<double>& h_final,
                      const std::vector<int>& gold, int competitive_o,
                      double margin);

// Reverse pass over the recorded argmin structure of one forward trace.
// Seeds are +-1/|set| on the members of the gold and non-target sets (the
// derivative of the averaged loss), routed per layer through the self path
// (alpha) and the min-message path (1 - alpha, to the recorded source).
// Zero everywhere when the margin is satisfied.
GradientReport grad_gnn(const LayerTrace& trace, const std::vector<int>& gold,
                        int competitive_o, double margin);

// h_hat^1 = h^1; h_hat^t = beta * h^t + (1 - beta) * h_hat^{t-1}.
std::vector<std::vector<double>> recurrent_forward(
    const std::vector<std::vector<double>>& step_h_final, double beta);

// Y^{t+} = union of labels at steps t..T.
std::vector<std::vector<int>> cumulative_step_labels(
    const std::vector<std::vector<int>>& step_labels);

// Per-step hinge on h_hat^{L,t} against Y^{t+}, averaged over T. Steps
// whose cumulative label set is empty, or whose competitive set is all
// gold, contribute nothing (the divisor stays T).
double hinge_loss_rgnn(const std::vector<std::vector<double>>& h_hat,
                       const std::vector<std::vector<int>>& step_labels,
                       int competitive_o, double margin);

// Everything one recurrent forward pass produces, kept for backprop.
struct RgnnForward {
  std::vector<LayerTrace> step_traces;          // per-step GNN traces
  std::vector<std::vector<double>> h_hat;       // per-step recurrent states
  GnnParams params;
};

RgnnForward rgnn_forward(const GraphOfPassages& g,
                         const std::vector<std::vector<double>>& step_h0,
                         const GnnParams& params, int relevant_k);

// Backward through the step recurrence, then into each step's GNN trace.
// d_beta accumulates dL/dh_hat^{L,t} * (h^{L,t} - h_hat^{L,t-1}) over
// steps t >= 2.
GradientReport grad_rgnn(const RgnnForward& fwd,
                         const std::vector<std::vector<int>>& step_labels,
                         int competitive_o, double margin);

// One gold id per step, chosen as the remaining id with the smallest
// raw distance for that step's subquestion; ids left over after the last
// step join the last step's label set. Steps beyond the pool stay empty.
std::vector<std::vector<int>> assign_step_labels(
    const std::vector<int>& gold,
    const std::vector<std::vector<double>>& step_h0);

struct TrainResult {
  GnnParams params;                 // lowest-loss iterate
  std::vector<double> loss_history; // full-batch loss per iteration
  double best_loss = 0.0;
  size_t best_iteration = 0;        // 1-based
  std::string stop_reason;          // "gradient", "rising-loss", "max-iterations"
  size_t skipped_examples = 0;
};

using IterationLog = std::function<void(size_t iteration, double loss,
                                        const GnnParams& params)>;

// Full-batch gradient descent with the fixed schedule: average gradient
// over examples, step with the configured learning rate, clamp parameters
// to [0, 1]; stop once |grad| falls below grad_stop_threshold or the loss
// rises loss_patience times in a row. Returns the lowest-loss iterate.
// Initialization defaults to alpha = 0.1 (single-query objective) and
// alpha = beta = 1.0 (recurrent objective) unless `init` overrides it.
// Throws Error{InvalidInput} on an empty example list and when every
// example is degenerate.
TrainResult train_gnn(const GraphOfPassages& g,
                      const std::vector<TrainingExampleGnn>& examples,
                      const HingeConfig& config, size_t layers = 1,
                      const IterationLog& log = {},
                      const std::optional<GnnParams>& init = std::nullopt);

TrainResult train_rgnn(const GraphOfPassages& g,
                       const std::vector<TrainingExampleRgnn>& examples,
                       const HingeConfig& config, size_t layers = 1,
                       const IterationLog& log = {},
                       const std::optional<GnnParams>& init = std::nullopt);

// Central-difference check of the analytic gradients on the given
// examples; returns the maximum relative error observed. Exposed for the
// check-gradients command.
double check_gradients_gnn(const GraphOfPassages& g,
                           const std::vector<TrainingExampleGnn>& examples,
                           const GnnParams& params, const HingeConfig& config,
                           double epsilon = 1e-5);

double check_gradients_rgnn(const GraphOfPassages& g,
                            const std::vector<TrainingExampleRgnn>& examples,
                            const GnnParams& params, const HingeConfig& config,
                            double epsilon = 1e-5);

// Training set records: {question, subquestions[], gold_passage_ids[]}.
struct TrainingRecord {
  std::string question;
  std::vector<std::string> subquestions;
  std::vector<int> gold_passage_ids;
};

std::vector<TrainingRecord> load_training_file(const std::filesystem::path& path);

}  // namespace gopret
