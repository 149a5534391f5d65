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

#include "gopret/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "gopret/error.hpp"

namespace gopret {

void GnnParams::validate() const {
  if (alphas.empty()) {
    throw Error(ErrorCode::InvalidInput, "params need at least one layer");
  }
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::InvalidInput, "alpha out of [0,1]: " + std::to_string(a));
    }
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "beta out of [0,1]: " + std::to_string(beta));
  }
}

GnnParams GnnParams::untrained(size_t layers) {
  GnnParams p;
  p.alphas.assign(layers, 0.5);
  p.beta = 0.9;
  return p;
}

void GnnParams::save(const std::filesystem::path& path) const {
  validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  nlohmann::json j = {{"version", 1}, {"alphas", alphas}, {"beta", beta}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

GnnParams GnnParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::Format, path.string() + ": malformed params file");
  }
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw Error(ErrorCode::VersionMismatch, path.string() + ": unsupported params version");
  }
  GnnParams p;
  p.alphas = j.at("alphas").get<std::vector<double>>();
  p.beta = j.at("beta").get<double>();
  p.validate();
  return p;
}

std::vector<int> select_relevant(const std::vector<double>& h, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "K must be >= 1");
  const size_t n = h.size();
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  const size_t take = std::min<size_t>(static_cast<size_t>(k), n);
  std::partial_sort(ids.begin(), ids.begin() + static_cast<long>(take), ids.end(),
                    [&](int a, int b) {
                      if (h[static_cast<size_t>(a)] != h[static_cast<size_t>(b)]) {
                        return h[static_cast<size_t>(a)] < h[static_cast<size_t>(b)];
                      }
                      return a < b;
                    });
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<double> propagate_layer(const GraphOfPassages& g,
                                    const std::vector<double>& h_prev, int k,
                                    double alpha, LayerStep* step, Aggregation agg) {
  if (h_prev.size() != g.node_count()) {
    throw Error(ErrorCode::InvalidInput,
                "state length " + std::to_string(h_prev.size()) +
                    " does not match node count " + std::to_string(g.node_count()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "alpha out of [0,1]");
  }

  const std::vector<int> relevant = select_relevant(h_prev, k);
  std::vector<char> is_relevant(g.node_count(), 0);
  for (int id : relevant) is_relevant[static_cast<size_t>(id)] = 1;

  std::vector<double> h_next = h_prev;
  std::vector<ReceivedMessage> receivers;

  for (size_t i = 0; i < g.node_count(); ++i) {
    int source = -1;
    double best = 0.0;
    double sum = 0.0;
    size_t hits = 0;
    for (int j : g.neighbors(static_cast<int>(i))) {
      if (!is_relevant[static_cast<size_t>(j)]) continue;
      const double hj = h_prev[static_cast<size_t>(j)];
      if (hits == 0 || hj < best) {  // strict: min ties keep the lowest id
        best = hj;
        source = j;
      }
      sum += hj;
      ++hits;
    }
    if (hits == 0) continue;
    const double message = agg == Aggregation::kMin ? best : sum / static_cast<double>(hits);
    h_next[i] = alpha * h_prev[i] + (1.0 - alpha) * message;
    receivers.push_back({static_cast<int>(i), source, message});
  }

  if (step != nullptr) {
    step->h_prev = h_prev;
    step->relevant = relevant;
    step->receivers = std::move(receivers);
    step->alpha = alpha;
  }
  return h_next;
}

std::vector<double> integrate(const GraphOfPassages& g, const std::vector<double>& h0,
                              const GnnParams& params, int k, LayerTrace* trace,
                              Aggregation agg) {
  params.validate();
  std::vector<double> h = h0;
  if (trace != nullptr) {
    trace->layers.clear();
    trace->layers.resize(params.layers());
  }
  for (size_t l = 0; l < params.layers(); ++l) {
    LayerStep* step = trace ? &trace->layers[l] : nullptr;
    h = propagate_layer(g, h, k, params.alphas[l], step, agg);
  }
  if (trace != nullptr) trace->h_final = h;
  return h;
}

std::vector<int> rank(const std::vector<double>& h) {
  std::vector<int> ids(h.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (h[static_cast<size_t>(a)] != h[static_cast<size_t>(b)]) {
      return h[static_cast<size_t>(a)] < h[static_cast<size_t>(b)];
    }
    return a < b;
  });
  return ids;
}

std::vector<int> retrieve(const std::vector<int>& ranked_ids,
                          const std::vector<int>& token_counts, int budget) {
  if (budget < 1) throw Error(ErrorCode::InvalidInput, "budget must be >= 1");
  std::vector<int> selected;
  long long used = 0;
  for (int id : ranked_ids) {
    const long long cost = token_counts.at(static_cast<size_t>(id));
    if (used + cost > budget) break;
    selected.push_back(id);
    used += cost;
  }
  return selected;
}

RetrievalResult rank_and_retrieve(const std::vector<double>& h_final,
                                  const GraphOfPassages& g, int budget) {
  RetrievalResult result;
  result.final_distances = h_final;
  result.ranked_ids = rank(h_final);
  std::vector<int> counts(g.node_count());
  for (size_t i = 0; i < g.node_count(); ++i) {
    counts[i] = g.passage(static_cast<int>(i)).token_count;
  }
  result.selected_ids = retrieve(result.ranked_ids, counts, budget);
  return result;
}

}  // namespace gopret
