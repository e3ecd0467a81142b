//
// Copyright 2026 The Legion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LEGION_FL_HPP_
#define LEGION_FL_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "legion/privacy.hpp"

namespace legion {

// Federated training of a logistic-regression detector for compromised (1)
// vs non-compromised (0) messages, with optional DP-SGD locally and FedAvg
// globally. Convex on purpose: gradients are checkable against finite
// differences and the DP noise path stays interpretable at desk scale.

struct Model {
  std::vector<double> weights;
  double bias = 0.0;

  static Model zeros(size_t dim) { return Model{std::vector<double>(dim, 0.0), 0.0}; }
};

struct Example {
  std::vector<double> features;
  int label = 0;  // 0 = non-compromised, 1 = compromised
};

using Dataset = std::vector<Example>;

struct TrainConfig {
  double learning_rate = 0.5;
  int local_steps = 30;
  int batch_size = 64;        // fixed-size batches by default
  double poisson_rate = 0.0;  // > 0 forces Poisson batches on the plain path
  int rounds = 3;
  std::optional<PrivacyParams> dp;  // engages Poisson batches at dp->sample_rate
  uint64_t seed = 0;                // stream used when no explicit seed is passed
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  // Set when a denominator was zero and the metric was defined as 0.
  bool degenerate_precision = false;
  bool degenerate_recall = false;
};

// Two unit-covariance Gaussian clusters with mean separation class_sep along
// a fixed unit direction; labels flipped independently with probability
// label_noise. Deterministic in seed.
Dataset synth_dataset(uint64_t seed, size_t n, size_t d, double class_sep, double label_noise);

// sigmoid(w . x + b). Throws DimensionMismatch.
double predict(const Model& model, std::span<const double> features);

struct Gradient {
  std::vector<double> weights;
  double bias = 0.0;
};

// Per-example logistic-loss gradient: ((p - y) x, p - y).
Gradient grad(const Model& model, const Example& example);

struct Update {
  std::vector<double> dweights;
  double dbias = 0.0;
};

// Local training; returns final minus initial model. Plain path: mini-batch
// SGD. DP path: per step, Poisson-sample the batch at rate q, clip each
// per-example (weights||bias) gradient to C, average over the batch, add
// per-coordinate Gaussian noise of stddev sigma*C/(q*|data|), and apply.
// Deterministic in (cfg, seed); with sigma = 0 and a clip bound no gradient
// reaches, the DP path is bit-identical to the plain path on Poisson batches.
Update local_train(const Model& start, const Dataset& data, const TrainConfig& cfg,
                   uint64_t seed);
inline Update local_train(const Model& start, const Dataset& data, const TrainConfig& cfg) {
  return local_train(start, data, cfg, cfg.seed);
}

// Weighted average of updates. Throws DimensionMismatch on ragged input and
// InvalidParams when weights sum to zero.
Update fedavg(std::span<const Update> updates, std::span<const double> weights);

Metrics evaluate(const Model& model, const Dataset& test, double threshold = 0.5);

// IID shard (default) or label-skewed shard of a dataset across clients.
// skew = 0 deals examples round-robin; skew in (0, 1] biases each label's
// examples toward a preferred client.
std::vector<Dataset> shard_dataset(const Dataset& data, size_t clients, double label_skew,
                                   uint64_t seed);

struct FederatedConfig {
  size_t clients = 3;
  TrainConfig local;
  bool secure_aggregation = false;
  double label_skew = 0.0;
  // Optional per-client multiplier applied to the local update before
  // aggregation (model poisoning). Empty means all ones.
  std::vector<double> poison_scale;
};

struct RoundMetrics {
  int round = 0;
  Metrics metrics;
};

// What the aggregator actually saw in one masked round: the blinded
// fixed-point words, never the raw update. Kept for report-level audits.
struct MaskedTranscriptEntry {
  int round = 0;
  uint32_t client_id = 0;
  std::vector<uint64_t> coords;
};

struct FederatedResult {
  Model model;
  std::vector<RoundMetrics> per_round;
  std::vector<MaskedTranscriptEntry> transcripts;  // filled under secure aggregation
};

// Full FedAvg run: shard, locally train each client per round (streams
// derived from (master_seed, client, round), so scheduling order cannot
// matter), aggregate equally-weighted, evaluate after every round.
// With secure_aggregation the per-round averaging consumes the masked
// fixed-point sum divided by the client count.
FederatedResult run_federated(const Dataset& train, const Dataset& test,
                              const FederatedConfig& cfg, uint64_t master_seed);

// One row of the DP-vs-non-DP comparison (mirrors the report table layout:
// one row per (round, setting) with accuracy, f1, recall).
struct CompareRow {
  int round = 0;
  std::string setting;  // "nodp" | "dp"
  Metrics metrics;
};

// Defaults chosen so the privacy noise is visible at desk scale: with small
// expected batches the calibrated sigma bottoms out near its subsampling-
// amplification floor instead of shrinking with q, and a clip bound above
// the typical gradient norm avoids clipping bias while scaling the injected
// noise with it. Together they reproduce a non-trivial DP accuracy penalty
// on an otherwise easy synthetic task.
struct CompareConfig {
  size_t clients = 3;
  int rounds = 3;
  size_t train_n = 20000;
  size_t test_n = 5000;
  size_t dim = 16;
  double class_sep = 6.0;
  double label_noise = 0.01;
  double eps_target = 1.64;
  double delta = 1e-5;
  int local_steps = 30;
  int batch_size = 2;
  double learning_rate = 0.5;
  double clip_norm = 10.0;
  bool secure_aggregation = false;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  double calibrated_sigma = 0.0;
  double q = 0.0;
  uint64_t accounted_steps = 0;
  double final_nodp_accuracy = 0.0;
  double final_dp_accuracy = 0.0;
};

// Paired non-DP vs DP federated runs on one synthetic dataset, with sigma
// calibrated so the accountant meets eps_target at delta over the run's
// total local steps.
CompareResult compare_dp_vs_nodp(const CompareConfig& cfg, uint64_t seed);

std::string compare_csv(const CompareResult& result);

}  // namespace legion

#endif  // LEGION_FL_HPP_
