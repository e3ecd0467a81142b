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

#include "legion/rng.hpp"

#include <cmath>

#include "legion/sha256.hpp"

namespace legion {
namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) {
  Bytes material;
  put_u64(material, seed);
  seed_material_ = sha256(ByteSpan(material.data(), material.size()));
  for (int i = 0; i < 4; ++i) s_[i] = get_u64(ByteSpan(seed_material_.data(), 32), 8 * i);
}

Rng::Rng(const Digest& seed_material) : seed_material_(seed_material) {
  for (int i = 0; i < 4; ++i) s_[i] = get_u64(ByteSpan(seed_material_.data(), 32), 8 * i);
  // Guard against the all-zero state, which xoshiro cannot leave.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
    uint64_t x = 1;
    for (auto& s : s_) s = splitmix64(x);
  }
}

Rng Rng::derive(std::string_view label, uint64_t a, uint64_t b) const {
  Bytes material(seed_material_.begin(), seed_material_.end());
  material.insert(material.end(), label.begin(), label.end());
  put_u64(material, a);
  put_u64(material, b);
  return Rng(sha256(ByteSpan(material.data(), material.size())));
}

uint64_t Rng::next_u64() {
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 random bits into [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::uniform_int(uint64_t lo, uint64_t hi) {
  uint64_t span = hi - lo + 1;  // hi - lo < 2^64 - 1 in all call sites
  if (span == 0) return next_u64();
  // Rejection sampling for an unbiased draw.
  uint64_t limit = UINT64_MAX - (UINT64_MAX % span + 1) % span;
  uint64_t v;
  do {
    v = next_u64();
  } while (v > limit);
  return lo + v % span;
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

double Rng::gaussian() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

void Rng::fill_bytes(uint8_t* out, size_t n) {
  size_t i = 0;
  while (i < n) {
    uint64_t w = next_u64();
    for (int k = 0; k < 8 && i < n; ++k, ++i) out[i] = static_cast<uint8_t>(w >> (8 * k));
  }
}

std::array<uint8_t, 32> Rng::key32() {
  std::array<uint8_t, 32> out{};
  fill_bytes(out.data(), out.size());
  return out;
}

std::array<uint8_t, 16> Rng::nonce16() {
  std::array<uint8_t, 16> out{};
  fill_bytes(out.data(), out.size());
  return out;
}

}  // namespace legion
