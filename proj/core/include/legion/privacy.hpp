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

#ifndef LEGION_PRIVACY_HPP_
#define LEGION_PRIVACY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "legion/rng.hpp"

namespace legion {

// DP-SGD noise/clipping configuration.
//   clip_norm C      : L2 bound applied to each per-example gradient
//   noise_multiplier : sigma; per-coordinate noise stddev is sigma * C
//   sample_rate q    : Poisson inclusion probability per example per step
//   delta            : target delta for the (epsilon, delta) conversion
struct PrivacyParams {
  double clip_norm = 1.0;
  double noise_multiplier = 1.0;
  double sample_rate = 0.01;
  double delta = 1e-5;

  // Throws InvalidParams when out of range.
  void check() const;
};

// Renyi-DP accountant state for the Poisson-subsampled Gaussian mechanism on
// the integer order grid alpha in {2, ..., 512}. RDP composes additively;
// to_epsilon converts the composed curve to an (epsilon, delta) guarantee.
class RdpCurve {
 public:
  static constexpr int kMinOrder = 2;
  static constexpr int kMaxOrder = 512;
  static constexpr int kOrderCount = kMaxOrder - kMinOrder + 1;

  RdpCurve() : eps_rdp_(kOrderCount, 0.0) {}

  double at_order(int alpha) const { return eps_rdp_.at(alpha - kMinOrder); }
  uint64_t steps() const { return steps_; }
  std::span<const double> values() const { return eps_rdp_; }

  friend RdpCurve compose(const RdpCurve& curve, double q, double sigma, uint64_t steps);

 private:
  std::vector<double> eps_rdp_;
  uint64_t steps_ = 0;
};

// L2 clipping: returns v unchanged (bit-exactly) when ||v|| <= C, else
// v * (C / ||v||). Throws NonFiniteInput on non-finite coordinates and
// InvalidParams when C <= 0.
std::vector<double> clip(std::span<const double> v, double clip_norm);

// Adds i.i.d. N(0, (sigma*C)^2) noise per coordinate, deterministic in the
// seed. sigma == 0 returns the input bit-exactly. Precondition: v already
// clipped to C.
std::vector<double> gaussian_mechanism(std::span<const double> v, double clip_norm, double sigma,
                                       uint64_t rng_seed);

// One step of the subsampled-Gaussian RDP bound at integer order alpha >= 2:
//
//   (1/(alpha-1)) * ln( sum_{k=0..alpha} C(alpha,k) (1-q)^(alpha-k) q^k
//                       * exp(k(k-1) / (2 sigma^2)) )
//
// evaluated with log-sum-exp. q = 0 yields 0; q = 1 reduces to the plain
// Gaussian bound alpha / (2 sigma^2). Throws InvalidParams for sigma <= 0
// with q > 0, DivergentBound if the sum is non-finite even in log space.
double rdp_step(double q, double sigma, int alpha);

// Additive composition: eps_rdp[alpha] += steps * rdp_step(q, sigma, alpha)
// across the whole grid.
RdpCurve compose(const RdpCurve& curve, double q, double sigma, uint64_t steps);

struct EpsilonResult {
  double epsilon = 0.0;
  int order = 0;
};

// Standard RDP -> (epsilon, delta) conversion, minimized over the grid:
//   epsilon = min_alpha [ eps_rdp(alpha) + ln(1/delta) / (alpha - 1) ]
EpsilonResult to_epsilon(const RdpCurve& curve, double delta);

// Smallest sigma (within 1e-3) whose composed, converted epsilon is at most
// eps_target for the given (q, steps, delta). Monotone bisection; throws
// Unachievable when eps_target does not exceed the grid floor
// ln(1/delta) / (kMaxOrder - 1).
double calibrate_sigma(double q, uint64_t steps, double delta, double eps_target);

inline constexpr double kSigmaTolerance = 1e-3;

}  // namespace legion

#endif  // LEGION_PRIVACY_HPP_
