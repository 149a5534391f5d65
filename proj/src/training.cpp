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

#include "gopret/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gopret/error.hpp"
#include "gopret/jsonl.hpp"

namespace gopret {

namespace {

double mean_over(const std::vector<double>& h, const std::vector<int>& ids) {
  double sum = 0.0;
  for (int id : ids) sum += h.at(static_cast<size_t>(id));
  return sum / static_cast<double>(ids.size());
}

void validate_gold(const std::vector<int>& gold, size_t n) {
  if (gold.empty()) {
    throw Error(ErrorCode::InvalidInput, "gold set must be nonempty");
  }
  for (int id : gold) {
    if (id < 0 || static_cast<size_t>(id) >= n) {
      throw Error(ErrorCode::InvalidInput, "gold id " + std::to_string(id) +
                                               " out of range for " + std::to_string(n) +
                                               " nodes");
    }
  }
}

// Margin violation before clamping; the loss is max(0, z).
double hinge_z(const std::vector<double>& h, const std::vector<int>& gold,
               const CompetitiveSets& sets, double margin) {
  return margin + mean_over(h, gold) - mean_over(h, sets.non_target);
}

// Routes dL/dh^L back through one recorded forward pass, accumulating the
// per-layer alpha gradients. `seed` is consumed as dL/dh at the final
// layer and holds dL/dh^0 on return.
void backward_through_trace(const LayerTrace& trace, std::vector<double>& seed,
                            std::vector<double>& d_alpha) {
  for (size_t l = trace.layers.size(); l-- > 0;) {
    const LayerStep& step = trace.layers[l];
    std::vector<double> prev_grad = seed;  // identity carry for non-receivers
    for (const ReceivedMessage& rm : step.receivers) {
      const double g = seed[static_cast<size_t>(rm.node)];
      d_alpha[l] += g * (step.h_prev[static_cast<size_t>(rm.node)] - rm.message);
      prev_grad[static_cast<size_t>(rm.node)] = step.alpha * g;
      prev_grad[static_cast<size_t>(rm.source)] += (1.0 - step.alpha) * g;
    }
    seed = std::move(prev_grad);
  }
}

}  // namespace

CompetitiveSets competitive_sets(const std::vector<double>& h_final,
                                 const std::vector<int>& gold, int competitive_o) {
  if (competitive_o < 1) {
    throw Error(ErrorCode::InvalidInput, "O must be >= 1");
  }
  validate_gold(gold, h_final.size());

  const std::vector<int> ranked = rank(h_final);
  const size_t take = std::min<size_t>(static_cast<size_t>(competitive_o), ranked.size());

  CompetitiveSets sets;
  sets.competitive.assign(ranked.begin(), ranked.begin() + static_cast<long>(take));
  std::sort(sets.competitive.begin(), sets.competitive.end());

  std::vector<char> is_gold(h_final.size(), 0);
  for (int id : gold) is_gold[static_cast<size_t>(id)] = 1;
  for (int id : sets.competitive) {
    if (!is_gold[static_cast<size_t>(id)]) sets.non_target.push_back(id);
  }
  if (sets.non_target.empty()) {
    throw Error(ErrorCode::DegenerateExample,
                "every competitive node is gold; no non-target comparator");
  }
  return sets;
}

double hinge_loss_gnn(const std::vector<double>& h_final, const std::vector<int>& gold,
                      int competitive_o, double margin) {
  const auto sets = competitive_sets(h_final, gold, competitive_o);
  return std::max(0.0, hinge_z(h_final, gold, sets, margin));
}

GradientReport grad_gnn(const LayerTrace& trace, const std::vector<int>& gold,
                        int competitive_o, double margin) {
  if (trace.layers.empty() || trace.h_final.empty()) {
    throw Error(ErrorCode::InvalidInput, "forward trace is incomplete");
  }
  for (const auto& step : trace.layers) {
    if (step.h_prev.size() != trace.h_final.size()) {
      throw Error(ErrorCode::InvalidInput, "trace layer/state size mismatch");
    }
  }
  validate_gold(gold, trace.h_final.size());

  GradientReport report;
  report.d_alpha.assign(trace.layers.size(), 0.0);

  const auto sets = competitive_sets(trace.h_final, gold, competitive_o);
  const double z = hinge_z(trace.h_final, gold, sets, margin);
  report.loss = std::max(0.0, z);
  if (z <= 0.0) return report;  // clamp region, zero everywhere

  std::vector<double> seed(trace.h_final.size(), 0.0);
  for (int id : gold) {
    seed[static_cast<size_t>(id)] = 1.0 / static_cast<double>(gold.size());
  }
  for (int id : sets.non_target) {
    seed[static_cast<size_t>(id)] = -1.0 / static_cast<double>(sets.non_target.size());
  }
  backward_through_trace(trace, seed, report.d_alpha);
  return report;
}

std::vector<std::vector<double>> recurrent_forward(
    const std::vector<std::vector<double>>& step_h_final, double beta) {
  if (step_h_final.empty()) {
    throw Error(ErrorCode::InvalidInput, "need at least one step");
  }
  std::vector<std::vector<double>> h_hat;
  h_hat.reserve(step_h_final.size());
  h_hat.push_back(step_h_final.front());
  for (size_t t = 1; t < step_h_final.size(); ++t) {
    const auto& h = step_h_final[t];
    const auto& prev = h_hat.back();
    if (h.size() != prev.size()) {
      throw Error(ErrorCode::InvalidInput, "step state sizes differ");
    }
    std::vector<double> mixed(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
      mixed[i] = beta * h[i] + (1.0 - beta) * prev[i];
    }
    h_hat.push_back(std::move(mixed));
  }
  return h_hat;
}

std::vector<std::vector<int>> cumulative_step_labels(
    const std::vector<std::vector<int>>& step_labels) {
  std::vector<std::vector<int>> cumulative(step_labels.size());
  std::vector<int> acc;
  for (size_t t = step_labels.size(); t-- > 0;) {
    acc.insert(acc.end(), step_labels[t].begin(), step_labels[t].end());
    std::sort(acc.begin(), acc.end());
    cumulative[t] = acc;
  }
  return cumulative;
}

double hinge_loss_rgnn(const std::vector<std::vector<double>>& h_hat,
                       const std::vector<std::vector<int>>& step_labels,
                       int competitive_o, double margin) {
  if (h_hat.size() != step_labels.size() || h_hat.empty()) {
    throw Error(ErrorCode::InvalidInput, "steps and labels must align and be nonempty");
  }
  const auto cumulative = cumulative_step_labels(step_labels);
  const double steps = static_cast<double>(h_hat.size());
  double total = 0.0;
  for (size_t t = 0; t < h_hat.size(); ++t) {
    if (cumulative[t].empty()) continue;  // nothing left to retrieve at this step
    try {
      const auto sets = competitive_sets(h_hat[t], cumulative[t], competitive_o);
      total += std::max(0.0, hinge_z(h_hat[t], cumulative[t], sets, margin));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateExample) throw;
    }
  }
  return total / steps;
}

RgnnForward rgnn_forward(const GraphOfPassages& g,
                         const std::vector<std::vector<double>>& step_h0,
                         const GnnParams& params, int relevant_k) {
  if (step_h0.empty()) {
    throw Error(ErrorCode::InvalidInput, "need at least one step");
  }
  RgnnForward fwd;
  fwd.params = params;
  fwd.step_traces.resize(step_h0.size());
  std::vector<std::vector<double>> finals;
  finals.reserve(step_h0.size());
  for (size_t t = 0; t < step_h0.size(); ++t) {
    finals.push_back(integrate(g, step_h0[t], params, relevant_k, &fwd.step_traces[t]));
  }
  fwd.h_hat = recurrent_forward(finals, params.beta);
  return fwd;
}

GradientReport grad_rgnn(const RgnnForward& fwd,
                         const std::vector<std::vector<int>>& step_labels,
                         int competitive_o, double margin) {
  const size_t steps = fwd.step_traces.size();
  if (steps == 0 || fwd.h_hat.size() != steps || step_labels.size() != steps) {
    throw Error(ErrorCode::InvalidInput, "forward pass and labels must align");
  }
  const size_t n = fwd.h_hat.front().size();
  const double beta = fwd.params.beta;
  const auto cumulative = cumulative_step_labels(step_labels);

  GradientReport report;
  report.d_alpha.assign(fwd.params.layers(), 0.0);

  // Local seeds: d(step loss)/d(h_hat^t), including the 1/T of the average.
  std::vector<std::vector<double>> local(steps, std::vector<double>(n, 0.0));
  for (size_t t = 0; t < steps; ++t) {
    if (cumulative[t].empty()) continue;
    CompetitiveSets sets;
    try {
      sets = competitive_sets(fwd.h_hat[t], cumulative[t], competitive_o);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateExample) throw;
      continue;
    }
    const double z = hinge_z(fwd.h_hat[t], cumulative[t], sets, margin);
    if (z <= 0.0) continue;
    report.loss += z / static_cast<double>(steps);
    for (int id : cumulative[t]) {
      local[t][static_cast<size_t>(id)] =
          1.0 / (static_cast<double>(steps) * static_cast<double>(cumulative[t].size()));
    }
    for (int id : sets.non_target) {
      local[t][static_cast<size_t>(id)] =
          -1.0 / (static_cast<double>(steps) * static_cast<double>(sets.non_target.size()));
    }
  }
  if (report.loss == 0.0) return report;

  // Backward through time: G_t = local_t + (1 - beta) G_{t+1}.
  std::vector<std::vector<double>> carried(steps);
  carried[steps - 1] = local[steps - 1];
  for (size_t t = steps - 1; t-- > 0;) {
    carried[t] = local[t];
    for (size_t i = 0; i < n; ++i) {
      carried[t][i] += (1.0 - beta) * carried[t + 1][i];
    }
  }

  for (size_t t = 1; t < steps; ++t) {
    const auto& h_t = fwd.step_traces[t].h_final;
    const auto& h_hat_prev = fwd.h_hat[t - 1];
    for (size_t i = 0; i < n; ++i) {
      report.d_beta += carried[t][i] * (h_t[i] - h_hat_prev[i]);
    }
  }

  // Into each step's own GNN: dL/dh^{L,t} is G_t at the first step (the
  // recurrence starts as identity) and beta * G_t afterwards.
  for (size_t t = 0; t < steps; ++t) {
    std::vector<double> seed = carried[t];
    if (t > 0) {
      for (double& v : seed) v *= beta;
    }
    backward_through_trace(fwd.step_traces[t], seed, report.d_alpha);
  }
  return report;
}

std::vector<std::vector<int>> assign_step_labels(
    const std::vector<int>& gold, const std::vector<std::vector<double>>& step_h0) {
  if (step_h0.empty()) {
    throw Error(ErrorCode::InvalidInput, "need at least one step");
  }
  validate_gold(gold, step_h0.front().size());

  std::vector<int> pool = gold;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<std::vector<int>> labels(step_h0.size());
  for (size_t t = 0; t < step_h0.size() && !pool.empty(); ++t) {
    const auto& h0 = step_h0[t];
    size_t best = 0;
    for (size_t i = 1; i < pool.size(); ++i) {
      const double a = h0.at(static_cast<size_t>(pool[i]));
      const double b = h0.at(static_cast<size_t>(pool[best]));
      if (a < b || (a == b && pool[i] < pool[best])) best = i;
    }
    labels[t].push_back(pool[best]);
    pool.erase(pool.begin() + static_cast<long>(best));
  }
  // Ids beyond the step count stay wanted until the end of the run.
  if (!pool.empty()) {
    auto& last = labels.back();
    last.insert(last.end(), pool.begin(), pool.end());
    std::sort(last.begin(), last.end());
  }
  return labels;
}

namespace {

struct BatchResult {
  double loss = 0.0;
  std::vector<double> d_alpha;
  double d_beta = 0.0;
  size_t used = 0;
  size_t skipped = 0;
};

template <typename EvalFn>
TrainResult run_descent(GnnParams params, const HingeConfig& config,
                        const EvalFn& eval, const IterationLog& log) {
  params.validate();
  TrainResult result;
  result.params = params;
  result.best_loss = std::numeric_limits<double>::infinity();
  result.stop_reason = "max-iterations";

  double prev_loss = std::numeric_limits<double>::infinity();
  int rising = 0;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const BatchResult batch = eval(params);
    if (batch.used == 0) {
      throw Error(ErrorCode::InvalidInput, "every training example is degenerate");
    }
    result.skipped_examples = batch.skipped;
    result.loss_history.push_back(batch.loss);
    if (log) log(static_cast<size_t>(iter), batch.loss, params);

    if (batch.loss < result.best_loss) {
      result.best_loss = batch.loss;
      result.params = params;
      result.best_iteration = static_cast<size_t>(iter);
    }

    double grad_mag = std::abs(batch.d_beta);
    for (double d : batch.d_alpha) grad_mag = std::max(grad_mag, std::abs(d));
    if (grad_mag < config.grad_stop_threshold) {
      result.stop_reason = "gradient";
      break;
    }
    if (iter > 1 && batch.loss > prev_loss) {
      if (++rising >= config.loss_patience) {
        result.stop_reason = "rising-loss";
        break;
      }
    } else {
      rising = 0;
    }
    prev_loss = batch.loss;

    for (size_t l = 0; l < params.alphas.size(); ++l) {
      params.alphas[l] = std::clamp(
          params.alphas[l] - config.learning_rate * batch.d_alpha[l], 0.0, 1.0);
    }
    params.beta =
        std::clamp(params.beta - config.learning_rate * batch.d_beta, 0.0, 1.0);
  }
  return result;
}

}  // namespace

TrainResult train_gnn(const GraphOfPassages& g,
                      const std::vector<TrainingExampleGnn>& examples,
                      const HingeConfig& config, size_t layers,
                      const IterationLog& log, const std::optional<GnnParams>& init) {
  if (examples.empty()) {
    throw Error(ErrorCode::InvalidInput, "no training examples");
  }
  GnnParams start;
  if (init) {
    start = *init;
  } else {
    start.alphas.assign(layers, 0.1);
    start.beta = 1.0;
  }

  auto eval = [&](const GnnParams& params) {
    BatchResult batch;
    batch.d_alpha.assign(params.layers(), 0.0);
    for (const auto& ex : examples) {
      LayerTrace trace;
      integrate(g, ex.h0, params, config.relevant_k, &trace);
      GradientReport report;
      try {
        report = grad_gnn(trace, ex.gold, config.competitive_o, config.margin);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateExample) throw;
        ++batch.skipped;
        continue;
      }
      batch.loss += report.loss;
      for (size_t l = 0; l < params.layers(); ++l) batch.d_alpha[l] += report.d_alpha[l];
      ++batch.used;
    }
    if (batch.used > 0) {
      batch.loss /= static_cast<double>(batch.used);
      for (double& d : batch.d_alpha) d /= static_cast<double>(batch.used);
    }
    return batch;
  };
  return run_descent(start, config, eval, log);
}

TrainResult train_rgnn(const GraphOfPassages& g,
                       const std::vector<TrainingExampleRgnn>& examples,
                       const HingeConfig& config, size_t layers,
                       const IterationLog& log, const std::optional<GnnParams>& init) {
  if (examples.empty()) {
    throw Error(ErrorCode::InvalidInput, "no training examples");
  }
  // Labels depend only on the raw per-step distances, never on parameters.
  std::vector<std::vector<std::vector<int>>> labels;
  labels.reserve(examples.size());
  for (const auto& ex : examples) {
    labels.push_back(assign_step_labels(ex.gold, ex.step_h0));
  }

  GnnParams start;
  if (init) {
    start = *init;
  } else {
    start.alphas.assign(layers, 1.0);
    start.beta = 1.0;
  }

  auto eval = [&](const GnnParams& params) {
    BatchResult batch;
    batch.d_alpha.assign(params.layers(), 0.0);
    for (size_t e = 0; e < examples.size(); ++e) {
      const RgnnForward fwd =
          rgnn_forward(g, examples[e].step_h0, params, config.relevant_k);
      const GradientReport report =
          grad_rgnn(fwd, labels[e], config.competitive_o, config.margin);
      batch.loss += report.loss;
      batch.d_beta += report.d_beta;
      for (size_t l = 0; l < params.layers(); ++l) batch.d_alpha[l] += report.d_alpha[l];
      ++batch.used;
    }
    if (batch.used > 0) {
      const double m = static_cast<double>(batch.used);
      batch.loss /= m;
      batch.d_beta /= m;
      for (double& d : batch.d_alpha) d /= m;
    }
    return batch;
  };
  return run_descent(start, config, eval, log);
}

double check_gradients_gnn(const GraphOfPassages& g,
                           const std::vector<TrainingExampleGnn>& examples,
                           const GnnParams& params, const HingeConfig& config,
                           double epsilon) {
  double worst = 0.0;
  for (const auto& ex : examples) {
    LayerTrace trace;
    integrate(g, ex.h0, params, config.relevant_k, &trace);
    GradientReport report;
    try {
      report = grad_gnn(trace, ex.gold, config.competitive_o, config.margin);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateExample) throw;
      continue;
    }
    for (size_t l = 0; l < params.layers(); ++l) {
      auto loss_at = [&](double alpha) {
        GnnParams perturbed = params;
        perturbed.alphas[l] = alpha;
        const auto h = integrate(g, ex.h0, perturbed, config.relevant_k);
        try {
          return hinge_loss_gnn(h, ex.gold, config.competitive_o, config.margin);
        } catch (const Error& err) {
          if (err.code() != ErrorCode::DegenerateExample) throw;
          return 0.0;
        }
      };
      const double fd = (loss_at(params.alphas[l] + epsilon) -
                         loss_at(params.alphas[l] - epsilon)) /
                        (2.0 * epsilon);
      const double denom = std::max({std::abs(fd), std::abs(report.d_alpha[l]), 1e-12});
      worst = std::max(worst, std::abs(report.d_alpha[l] - fd) / denom);
    }
  }
  return worst;
}

double check_gradients_rgnn(const GraphOfPassages& g,
                            const std::vector<TrainingExampleRgnn>& examples,
                            const GnnParams& params, const HingeConfig& config,
                            double epsilon) {
  double worst = 0.0;
  for (const auto& ex : examples) {
    const auto labels = assign_step_labels(ex.gold, ex.step_h0);
    const auto fwd = rgnn_forward(g, ex.step_h0, params, config.relevant_k);
    const auto report = grad_rgnn(fwd, labels, config.competitive_o, config.margin);

    auto loss_with = [&](const GnnParams& perturbed) {
      const auto f = rgnn_forward(g, ex.step_h0, perturbed, config.relevant_k);
      return hinge_loss_rgnn(f.h_hat, labels, config.competitive_o, config.margin);
    };
    for (size_t l = 0; l < params.layers(); ++l) {
      GnnParams lo = params, hi = params;
      lo.alphas[l] -= epsilon;
      hi.alphas[l] += epsilon;
      const double fd = (loss_with(hi) - loss_with(lo)) / (2.0 * epsilon);
      const double denom = std::max({std::abs(fd), std::abs(report.d_alpha[l]), 1e-12});
      worst = std::max(worst, std::abs(report.d_alpha[l] - fd) / denom);
    }
    {
      GnnParams lo = params, hi = params;
      lo.beta -= epsilon;
      hi.beta += epsilon;
      const double fd = (loss_with(hi) - loss_with(lo)) / (2.0 * epsilon);
      const double denom = std::max({std::abs(fd), std::abs(report.d_beta), 1e-12});
      worst = std::max(worst, std::abs(report.d_beta - fd) / denom);
    }
  }
  return worst;
}

std::vector<TrainingRecord> load_training_file(const std::filesystem::path& path) {
  std::vector<TrainingRecord> records;
  read_jsonl(path, [&](const nlohmann::json& r, size_t line) {
    try {
      TrainingRecord rec;
      rec.question = r.at("question").get<std::string>();
      if (r.contains("subquestions")) {
        rec.subquestions = r["subquestions"].get<std::vector<std::string>>();
      }
      rec.gold_passage_ids = r.at("gold_passage_ids").get<std::vector<int>>();
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Format, path.string() + ": bad training record at line " +
                                         std::to_string(line) + ": " + e.what());
    }
  });
  if (records.empty()) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": no training records");
  }
  return records;
}

}  // namespace gopret
