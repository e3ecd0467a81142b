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

#include "legion/fl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "legion/errors.hpp"
#include "legion/secure_agg.hpp"

namespace legion {
namespace {

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// One SGD step shared by the plain and DP paths. `batch` holds example
// indices. Both paths average the (possibly clipped) per-example gradients
// over the actual batch; the DP path then adds Gaussian noise whose stddev
// sigma*C/(q*n) is normalized by the expected batch size. With sigma = 0 and
// a clip bound no gradient reaches, the DP step is bit-identical to the
// plain step on the same batch.
void apply_step(Model& model, const Dataset& data, std::span<const size_t> batch,
                const TrainConfig& cfg, Rng* noise_rng) {
  const size_t d = model.weights.size();
  std::vector<double> gavg(d + 1, 0.0);
  for (size_t idx : batch) {
    Gradient g = grad(model, data[idx]);
    if (cfg.dp) {
      std::vector<double> flat(d + 1);
      std::copy(g.weights.begin(), g.weights.end(), flat.begin());
      flat[d] = g.bias;
      flat = clip(flat, cfg.dp->clip_norm);
      for (size_t i = 0; i <= d; ++i) gavg[i] += flat[i];
    } else {
      for (size_t i = 0; i < d; ++i) gavg[i] += g.weights[i];
      gavg[d] += g.bias;
    }
  }
  if (!batch.empty())
    for (double& v : gavg) v /= static_cast<double>(batch.size());

  if (cfg.dp && cfg.dp->noise_multiplier > 0.0) {
    double expected_batch = cfg.dp->sample_rate * static_cast<double>(data.size());
    if (expected_batch > 0.0) {
      double stddev = cfg.dp->noise_multiplier * cfg.dp->clip_norm / expected_batch;
      for (double& v : gavg) v += stddev * noise_rng->gaussian();
    }
  }

  for (size_t i = 0; i < d; ++i) model.weights[i] -= cfg.learning_rate * gavg[i];
  model.bias -= cfg.learning_rate * gavg[d];
}

}  // namespace

Dataset synth_dataset(uint64_t seed, size_t n, size_t d, double class_sep, double label_noise) {
  if (n == 0 || d < 2) throw InvalidParams("synth_dataset: need n > 0 and d >= 2");
  if (!(class_sep >= 0.0)) throw InvalidParams("synth_dataset: class_sep must be >= 0");
  if (!(label_noise >= 0.0 && label_noise < 0.5))
    throw InvalidParams("synth_dataset: label_noise must be in [0, 0.5)");

  Rng rng = Rng(seed).derive("synth-dataset");
  // Cluster means at +/- (class_sep / 2) along the first axis.
  Dataset out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    int cls = rng.bernoulli(0.5) ? 1 : 0;
    Example ex;
    ex.features.resize(d);
    double shift = (cls == 1 ? 0.5 : -0.5) * class_sep;
    for (size_t j = 0; j < d; ++j) ex.features[j] = rng.gaussian() + (j == 0 ? shift : 0.0);
    ex.label = rng.bernoulli(label_noise) ? 1 - cls : cls;
    out.push_back(std::move(ex));
  }
  return out;
}

double predict(const Model& model, std::span<const double> features) {
  if (features.size() != model.weights.size())
    throw DimensionMismatch("predict: feature dimension mismatch");
  double z = model.bias;
  for (size_t i = 0; i < features.size(); ++i) z += model.weights[i] * features[i];
  return sigmoid(z);
}

Gradient grad(const Model& model, const Example& example) {
  double p = predict(model, example.features);
  double r = p - static_cast<double>(example.label);
  Gradient g;
  g.weights.resize(model.weights.size());
  for (size_t i = 0; i < g.weights.size(); ++i) g.weights[i] = r * example.features[i];
  g.bias = r;
  return g;
}

Update local_train(const Model& start, const Dataset& data, const TrainConfig& cfg,
                   uint64_t seed) {
  if (data.empty()) throw EmptyData("local_train: empty dataset");
  if (cfg.dp) cfg.dp->check();

  Model model = start;
  Rng root(seed);
  // Poisson batching when DP is engaged (rate dp->sample_rate) or when
  // explicitly requested via poisson_rate; fixed-size batches otherwise.
  double poisson_q = cfg.dp ? cfg.dp->sample_rate : cfg.poisson_rate;
  for (int step = 0; step < cfg.local_steps; ++step) {
    Rng batch_rng = root.derive("batch", static_cast<uint64_t>(step));
    std::vector<size_t> batch;
    if (poisson_q > 0.0) {
      // Poisson sampling: every example independently with probability q.
      for (size_t i = 0; i < data.size(); ++i)
        if (batch_rng.bernoulli(poisson_q)) batch.push_back(i);
    } else {
      batch.reserve(cfg.batch_size);
      for (int i = 0; i < cfg.batch_size; ++i)
        batch.push_back(batch_rng.uniform_int(0, data.size() - 1));
    }
    Rng noise_rng = root.derive("noise", static_cast<uint64_t>(step));
    apply_step(model, data, batch, cfg, &noise_rng);
  }

  Update u;
  u.dweights.resize(model.weights.size());
  for (size_t i = 0; i < model.weights.size(); ++i)
    u.dweights[i] = model.weights[i] - start.weights[i];
  u.dbias = model.bias - start.bias;
  return u;
}

Update fedavg(std::span<const Update> updates, std::span<const double> weights) {
  if (updates.empty()) throw EmptyData("fedavg: no updates");
  if (weights.size() != updates.size()) throw DimensionMismatch("fedavg: weight count mismatch");
  const size_t d = updates.front().dweights.size();
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidParams("fedavg: weights must be positive");
    wsum += w;
  }
  Update out;
  out.dweights.assign(d, 0.0);
  for (size_t c = 0; c < updates.size(); ++c) {
    if (updates[c].dweights.size() != d) throw DimensionMismatch("fedavg: ragged updates");
    for (size_t i = 0; i < d; ++i) out.dweights[i] += weights[c] * updates[c].dweights[i];
    out.dbias += weights[c] * updates[c].dbias;
  }
  for (double& v : out.dweights) v /= wsum;
  out.dbias /= wsum;
  return out;
}

Metrics evaluate(const Model& model, const Dataset& test, double threshold) {
  if (test.empty()) throw EmptyData("evaluate: empty test set");
  Metrics m;
  for (const Example& ex : test) {
    bool pos = predict(model, ex.features) >= threshold;
    if (ex.label == 1) {
      pos ? ++m.tp : ++m.fn;
    } else {
      pos ? ++m.fp : ++m.tn;
    }
  }
  double total = static_cast<double>(m.tp + m.fp + m.fn + m.tn);
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  if (m.tp + m.fp > 0) {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  } else {
    m.degenerate_precision = true;
  }
  if (m.tp + m.fn > 0) {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  } else {
    m.degenerate_recall = true;
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

std::vector<Dataset> shard_dataset(const Dataset& data, size_t clients, double label_skew,
                                   uint64_t seed) {
  if (clients == 0) throw InvalidParams("shard_dataset: need at least one client");
  std::vector<Dataset> shards(clients);
  Rng rng = Rng(seed).derive("shard");
  size_t rr = 0;
  for (const Example& ex : data) {
    size_t target;
    if (label_skew > 0.0 && rng.bernoulli(label_skew)) {
      // Preferred client per label: evens for 0, odds for 1 (mod clients).
      size_t preferred = (ex.label == 0) ? 0 : (clients > 1 ? 1 : 0);
      target = preferred;
    } else {
      target = rr++ % clients;
    }
    shards[target].push_back(ex);
  }
  return shards;
}

FederatedResult run_federated(const Dataset& train, const Dataset& test,
                              const FederatedConfig& cfg, uint64_t master_seed) {
  if (cfg.clients == 0) throw InvalidParams("run_federated: need at least one client");
  if (!cfg.poison_scale.empty() && cfg.poison_scale.size() != cfg.clients)
    throw InvalidParams("run_federated: poison_scale size mismatch");

  Rng master(master_seed);
  std::vector<Dataset> shards =
      shard_dataset(train, cfg.clients, cfg.label_skew, master.derive("shard-seed").next_u64());
  for (const Dataset& s : shards)
    if (s.empty()) throw EmptyData("run_federated: a client shard is empty");

  // Pairwise mask seeds are provisioned out of band by the runner.
  std::vector<std::vector<std::array<uint8_t, 32>>> pair_seed(cfg.clients);
  if (cfg.secure_aggregation) {
    for (size_t i = 0; i < cfg.clients; ++i) {
      pair_seed[i].resize(cfg.clients);
      for (size_t j = i + 1; j < cfg.clients; ++j)
        pair_seed[i][j] = master.derive("pair-seed", i, j).key32();
    }
  }

  FederatedResult result;
  result.model = Model::zeros(test.empty() ? shards[0][0].features.size()
                                           : test[0].features.size());

  const size_t d = result.model.weights.size();
  for (int round = 1; round <= cfg.local.rounds; ++round) {
    std::vector<Update> updates(cfg.clients);
    for (size_t c = 0; c < cfg.clients; ++c) {
      TrainConfig local = cfg.local;
      uint64_t client_seed = master.derive("client", c, static_cast<uint64_t>(round)).next_u64();
      updates[c] = local_train(result.model, shards[c], local, client_seed);
      if (!cfg.poison_scale.empty() && cfg.poison_scale[c] != 1.0) {
        for (double& v : updates[c].dweights) v *= cfg.poison_scale[c];
        updates[c].dbias *= cfg.poison_scale[c];
      }
    }

    Update avg;
    if (cfg.secure_aggregation) {
      std::vector<QuantizedUpdate> masked;
      std::vector<uint32_t> roster;
      for (size_t c = 0; c < cfg.clients; ++c) {
        std::vector<double> flat(d + 1);
        std::copy(updates[c].dweights.begin(), updates[c].dweights.end(), flat.begin());
        flat[d] = updates[c].dbias;
        QuantizedUpdate qu;
        qu.client_id = static_cast<uint32_t>(c);
        qu.round = static_cast<uint32_t>(round);
        qu.coords = quantize(flat);
        std::vector<PeerSeed> peers;
        for (size_t j = 0; j < cfg.clients; ++j) {
          if (j == c) continue;
          size_t lo = std::min(c, j), hi = std::max(c, j);
          peers.push_back({static_cast<uint32_t>(j), pair_seed[lo][hi]});
        }
        masked.push_back(mask_update(qu, peers));
        roster.push_back(static_cast<uint32_t>(c));
        result.transcripts.push_back(
            {round, static_cast<uint32_t>(c), masked.back().coords});
      }
      std::vector<double> sum = aggregate(masked, roster);
      avg.dweights.assign(sum.begin(), sum.begin() + d);
      avg.dbias = sum[d];
      double k = static_cast<double>(cfg.clients);
      for (double& v : avg.dweights) v /= k;
      avg.dbias /= k;
    } else {
      std::vector<double> ones(cfg.clients, 1.0);
      avg = fedavg(updates, ones);
    }

    for (size_t i = 0; i < d; ++i) result.model.weights[i] += avg.dweights[i];
    result.model.bias += avg.dbias;

    if (!test.empty()) result.per_round.push_back({round, evaluate(result.model, test)});
  }
  return result;
}

CompareResult compare_dp_vs_nodp(const CompareConfig& cfg, uint64_t seed) {
  Rng master(seed);
  Dataset train = synth_dataset(master.derive("train-data").next_u64(), cfg.train_n, cfg.dim,
                                cfg.class_sep, cfg.label_noise);
  Dataset test = synth_dataset(master.derive("test-data").next_u64(), cfg.test_n, cfg.dim,
                               cfg.class_sep, cfg.label_noise);

  CompareResult result;
  // Poisson rate chosen so the expected DP batch matches the plain batch
  // size on a shard of |train| / clients examples.
  size_t shard_n = cfg.train_n / cfg.clients;
  result.q = std::min(1.0, static_cast<double>(cfg.batch_size) / static_cast<double>(shard_n));
  result.accounted_steps =
      static_cast<uint64_t>(cfg.rounds) * static_cast<uint64_t>(cfg.local_steps);
  result.calibrated_sigma =
      calibrate_sigma(result.q, result.accounted_steps, cfg.delta, cfg.eps_target);

  FederatedConfig fed;
  fed.clients = cfg.clients;
  fed.secure_aggregation = cfg.secure_aggregation;
  fed.local.learning_rate = cfg.learning_rate;
  fed.local.local_steps = cfg.local_steps;
  fed.local.batch_size = cfg.batch_size;
  fed.local.rounds = cfg.rounds;

  uint64_t run_seed = master.derive("fed-run").next_u64();
  FederatedResult nodp = run_federated(train, test, fed, run_seed);

  fed.local.dp = PrivacyParams{cfg.clip_norm, result.calibrated_sigma, result.q, cfg.delta};
  FederatedResult dp = run_federated(train, test, fed, run_seed);

  for (const RoundMetrics& rm : nodp.per_round) result.rows.push_back({rm.round, "nodp", rm.metrics});
  for (const RoundMetrics& rm : dp.per_round) result.rows.push_back({rm.round, "dp", rm.metrics});
  std::sort(result.rows.begin(), result.rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.round != b.round) return a.round < b.round;
    return a.setting > b.setting;  // nodp before dp, matching the table layout
  });
  result.final_nodp_accuracy = nodp.per_round.back().metrics.accuracy;
  result.final_dp_accuracy = dp.per_round.back().metrics.accuracy;
  return result;
}

std::string compare_csv(const CompareResult& result) {
  std::string out = "round,setting,accuracy,f1,recall\n";
  char buf[160];
  for (const CompareRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.4f,%.4f,%.4f\n", row.round, row.setting.c_str(),
                  row.metrics.accuracy, row.metrics.f1, row.metrics.recall);
    out += buf;
  }
  return out;
}

}  // namespace legion
