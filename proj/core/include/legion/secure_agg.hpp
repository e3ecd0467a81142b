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

#ifndef LEGION_SECURE_AGG_HPP_
#define LEGION_SECURE_AGG_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "legion/bytes.hpp"

namespace legion {

// Exact-cancellation secure aggregation over the mod-2^64 ring.
//
// Updates are quantized to fixed point (two's complement embedded into
// uint64), then each pair of clients (i, j), i < j, blinds with the same
// PRF-derived vector: i adds it, j subtracts it. Summed over the full roster
// the masks cancel exactly and the aggregator learns only the sum. Exactness
// is the reason for integer arithmetic: floating-point masks of this
// magnitude could not cancel bit-for-bit.
//
// No dropout recovery: aggregation refuses (RosterIncomplete) unless every
// expected client's update is present, because a partial sum would silently
// include uncancelled masks.

// Fixed-point scale, power of two. 2^16 leaves headroom for clipped updates
// from up to 2^6 clients in the 64-bit ring.
inline constexpr uint64_t kDefaultQuantScale = uint64_t(1) << 16;

struct QuantizedUpdate {
  uint32_t client_id = 0;
  uint32_t round = 0;
  std::vector<uint64_t> coords;
  uint64_t scale = kDefaultQuantScale;
};

// Round-to-nearest-even of v[i] * scale, two's complement into the unsigned
// domain. Throws Overflow when |v[i] * scale| >= 2^62 (headroom bound).
std::vector<uint64_t> quantize(std::span<const double> v, uint64_t scale = kDefaultQuantScale);

// Inverse embedding; exact up to quantization error <= 1/(2*scale) per
// coordinate.
std::vector<double> dequantize(std::span<const uint64_t> coords,
                               uint64_t scale = kDefaultQuantScale);

// Deterministic PRF expansion of (seed, round) into dim 64-bit words
// (HMAC-SHA-256 in counter mode).
std::vector<uint64_t> derive_mask(const std::array<uint8_t, 32>& seed, uint32_t round, size_t dim);

struct PeerSeed {
  uint32_t peer_id = 0;
  std::array<uint8_t, 32> seed{};
};

// Applies all pairwise masks for this client: + mask for peers with larger
// id, - mask for peers with smaller id (mod 2^64). Both sides of a pair must
// hold the same seed. Peers must exclude the client itself.
QuantizedUpdate mask_update(const QuantizedUpdate& update, std::span<const PeerSeed> peers);

// Coordinate-wise mod-2^64 sum, decoded and dequantized. Requires every
// update to share round/dimension/scale and the client set to equal the
// expected roster exactly; otherwise RosterIncomplete.
std::vector<double> aggregate(std::span<const QuantizedUpdate> updates,
                              std::span<const uint32_t> expected_roster);

}  // namespace legion

#endif  // LEGION_SECURE_AGG_HPP_
