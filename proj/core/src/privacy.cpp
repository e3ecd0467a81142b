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

#include "legion/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "legion/errors.hpp"

namespace legion {
namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_sum_exp(const std::vector<double>& log_terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : log_terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;  // empty or all -inf
  double acc = 0.0;
  for (double t : log_terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace

void PrivacyParams::check() const {
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm))
    throw InvalidParams("clip_norm must be positive");
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier))
    throw InvalidParams("noise_multiplier must be nonnegative");
  if (!(sample_rate >= 0.0 && sample_rate <= 1.0))
    throw InvalidParams("sample_rate must be in [0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta must be in (0,1)");
}

std::vector<double> clip(std::span<const double> v, double clip_norm) {
  if (!(clip_norm > 0.0)) throw InvalidParams("clip: clip_norm must be positive");
  double sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw NonFiniteInput("clip: non-finite coordinate");
    sq += x * x;
  }
  std::vector<double> out(v.begin(), v.end());
  double norm = std::sqrt(sq);
  if (norm > clip_norm) {
    double s = clip_norm / norm;
    for (double& x : out) x *= s;
  }
  return out;
}

std::vector<double> gaussian_mechanism(std::span<const double> v, double clip_norm, double sigma,
                                       uint64_t rng_seed) {
  std::vector<double> out(v.begin(), v.end());
  if (sigma == 0.0) return out;
  double stddev = sigma * clip_norm;
  Rng rng = Rng(rng_seed).derive("gaussian-mechanism");
  for (double& x : out) x += stddev * rng.gaussian();
  return out;
}

double rdp_step(double q, double sigma, int alpha) {
  if (alpha < 2) throw InvalidParams("rdp_step: alpha must be >= 2");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParams("rdp_step: q must be in [0,1]");
  if (q == 0.0) return 0.0;
  if (!(sigma > 0.0)) throw InvalidParams("rdp_step: sigma must be positive when q > 0");

  const double log_q = std::log(q);
  const double log_1mq = (q < 1.0) ? std::log1p(-q) : -std::numeric_limits<double>::infinity();
  std::vector<double> log_terms;
  log_terms.reserve(alpha + 1);
  for (int k = 0; k <= alpha; ++k) {
    if (q == 1.0 && k < alpha) continue;  // (1-q)^(alpha-k) vanishes
    double t = log_choose(alpha, k) + k * log_q + (alpha - k) * (k == alpha ? 0.0 : log_1mq) +
               0.5 * k * (k - 1) / (sigma * sigma);
    log_terms.push_back(t);
  }
  double lse = log_sum_exp(log_terms);
  if (!std::isfinite(lse)) throw DivergentBound("rdp_step: sum overflows in log space");
  double eps = lse / (alpha - 1);
  // The bound is nonnegative; tiny negative values are rounding artifacts.
  return std::max(eps, 0.0);
}

RdpCurve compose(const RdpCurve& curve, double q, double sigma, uint64_t steps) {
  RdpCurve out = curve;
  if (steps == 0) return out;
  for (int alpha = RdpCurve::kMinOrder; alpha <= RdpCurve::kMaxOrder; ++alpha) {
    out.eps_rdp_[alpha - RdpCurve::kMinOrder] +=
        static_cast<double>(steps) * rdp_step(q, sigma, alpha);
  }
  out.steps_ += steps;
  return out;
}

EpsilonResult to_epsilon(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("to_epsilon: delta must be in (0,1)");
  double log_inv_delta = std::log(1.0 / delta);
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0};
  for (int alpha = RdpCurve::kMinOrder; alpha <= RdpCurve::kMaxOrder; ++alpha) {
    double eps = curve.at_order(alpha) + log_inv_delta / (alpha - 1);
    if (eps < best.epsilon) best = {eps, alpha};
  }
  return best;
}

double calibrate_sigma(double q, uint64_t steps, double delta, double eps_target) {
  double floor_eps = std::log(1.0 / delta) / (RdpCurve::kMaxOrder - 1);
  if (!(eps_target > floor_eps))
    throw Unachievable("calibrate_sigma: target below the conversion floor of the order grid");

  auto eps_at = [&](double sigma) {
    return to_epsilon(compose(RdpCurve{}, q, sigma, steps), delta).epsilon;
  };

  double lo = kSigmaTolerance;  // assumed too small; verified below
  double hi = 1.0;
  while (eps_at(hi) > eps_target) {
    hi *= 2.0;
    if (hi > 1e6) throw Unachievable("calibrate_sigma: no sigma below 1e6 meets the target");
  }
  if (eps_at(lo) <= eps_target) return lo;
  while (hi - lo > kSigmaTolerance) {
    double mid = 0.5 * (lo + hi);
    if (eps_at(mid) <= eps_target) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace legion
