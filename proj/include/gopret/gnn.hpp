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

#include <cstdint>
#include <string>
#include <vector>

#include "gopret/corpus.hpp"

namespace gopret {

// Per-layer mixing weights plus the cross-step recurrent weight. All
// values live in [0, 1]: each update is a convex combination, so diffused
// distances stay inside the range spanned by their inputs.
struct GnnParams {
  std::vector<double> alphas;  // one per layer
  double beta = 0.9;

  size_t layers() const { return alphas.size(); }

  // Throws Error{InvalidInput} unless layers >= 1 and every value is in
  // [0, 1].
  void validate() const;

  // Untrained defaults: alpha = 0.5, beta = 0.9, one layer.
  static GnnParams untrained(size_t layers = 1);

  void save(const std::filesystem::path& path) const;
  static GnnParams load(const std::filesystem::path& path);
};

// How neighbor messages are aggregated. Min is the method; mean exists
// only as an evaluation-time alternative (no gradient support).
enum class Aggregation { kMin, kMean };

// One receiver inside a layer: which relevant neighbor supplied its
// message and what the message was. Ties in the min go to the lowest
// source id.
struct ReceivedMessage {
  int node = -1;
  int source = -1;
  double message = 0.0;
};

// Everything the backward pass needs about one layer's forward step.
struct LayerStep {
  std::vector<double> h_prev;            // states the layer consumed
  std::vector<int> relevant;             // top-K smallest, ascending id
  std::vector<ReceivedMessage> receivers;  // ascending node id
  double alpha = 0.0;
};

struct LayerTrace {
  std::vector<LayerStep> layers;
  std::vector<double> h_final;
};

// Ranked ids plus the budgeted prefix actually handed to the prompt.
struct RetrievalResult {
  std::vector<int> ranked_ids;
  std::vector<int> selected_ids;
  std::vector<double> final_distances;
};

// The min(K, n) node ids with smallest h, ties broken by ascending id.
// Returned ascending by id.
std::vector<int> select_relevant(const std::vector<double>& h, int k);

// One diffusion layer: relevant nodes emit their state; each neighbor of
// the relevant set receives the minimum across relevant neighbors and
// mixes it in as h = alpha * h_prev + (1 - alpha) * m. Nodes without a
// received message keep their previous state. A relevant node's own state
// never feeds its own min (the graph has no self-loops).
std::vector<double> propagate_layer(const GraphOfPassages& g,
                                    const std::vector<double>& h_prev, int k,
                                    double alpha, LayerStep* step = nullptr,
                                    Aggregation agg = Aggregation::kMin);

// L sequential layers; the relevant set is recomputed from each layer's
// input states. The trace is complete enough to run the backward pass.
std::vector<double> integrate(const GraphOfPassages& g,
                              const std::vector<double>& h0,
                              const GnnParams& params, int k,
                              LayerTrace* trace = nullptr,
                              Aggregation agg = Aggregation::kMin);

// Ascending by (distance, passage id).
std::vector<int> rank(const std::vector<double>& h);

// Greedy prefix of the ranking whose token sum fits the budget; stops at
// the first passage that would overflow. May be empty.
std::vector<int> retrieve(const std::vector<int>& ranked_ids,
                          const std::vector<int>& token_counts, int budget);

RetrievalResult rank_and_retrieve(const std::vector<double>& h_final,
                                  const GraphOfPassages& g, int budget);

}  // namespace gopret
