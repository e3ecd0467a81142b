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

#ifndef LEGION_RNG_HPP_
#define LEGION_RNG_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "legion/bytes.hpp"

namespace legion {

// Deterministic xoshiro256** generator. Every stochastic component in the
// project draws from an Rng seeded explicitly; nothing reads entropy from the
// environment, which is what makes runs and traces bit-reproducible.
//
// derive() builds statistically independent substreams by hashing the parent
// seed material with a label, so e.g. per-(client, round) training streams do
// not depend on scheduling order.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  explicit Rng(const Digest& seed_material);

  // Independent child stream identified by (label, a, b).
  Rng derive(std::string_view label, uint64_t a = 0, uint64_t b = 0) const;

  uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  uint64_t uniform_int(uint64_t lo, uint64_t hi);

  bool bernoulli(double p);

  // Standard normal via Marsaglia polar; one value per call, no caching, so a
  // stream's output depends only on the call sequence.
  double gaussian();

  void fill_bytes(uint8_t* out, size_t n);
  std::array<uint8_t, 32> key32();
  std::array<uint8_t, 16> nonce16();

 private:
  Digest seed_material_;  // retained for derive()
  uint64_t s_[4];
};

}  // namespace legion

#endif  // LEGION_RNG_HPP_
