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

#include "legion/secure_agg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "legion/errors.hpp"
#include "legion/sha256.hpp"

namespace legion {

std::vector<uint64_t> quantize(std::span<const double> v, uint64_t scale) {
  constexpr double kHeadroom = 4611686018427387904.0;  // 2^62
  std::vector<uint64_t> out;
  out.reserve(v.size());
  for (double x : v) {
    if (!std::isfinite(x)) throw Overflow("quantize: non-finite coordinate");
    double scaled = x * static_cast<double>(scale);
    if (!(std::fabs(scaled) < kHeadroom)) throw Overflow("quantize: magnitude exceeds headroom");
    double r = std::nearbyint(scaled);  // ties to even under the default mode
    int64_t s = static_cast<int64_t>(r);
    out.push_back(static_cast<uint64_t>(s));
  }
  return out;
}

std::vector<double> dequantize(std::span<const uint64_t> coords, uint64_t scale) {
  std::vector<double> out;
  out.reserve(coords.size());
  for (uint64_t u : coords) {
    int64_t s = static_cast<int64_t>(u);
    out.push_back(static_cast<double>(s) / static_cast<double>(scale));
  }
  return out;
}

std::vector<uint64_t> derive_mask(const std::array<uint8_t, 32>& seed, uint32_t round,
                                  size_t dim) {
  std::vector<uint64_t> out;
  out.reserve(dim);
  uint32_t block = 0;
  while (out.size() < dim) {
    Bytes msg;
    msg.reserve(12 + 4);
    msg.insert(msg.end(), {'m', 'a', 's', 'k'});
    put_u32(msg, round);
    put_u32(msg, block++);
    Digest d = hmac_sha256(ByteSpan(seed.data(), seed.size()), ByteSpan(msg.data(), msg.size()));
    for (size_t off = 0; off < 32 && out.size() < dim; off += 8)
      out.push_back(get_u64(ByteSpan(d.data(), 32), off));
  }
  return out;
}

QuantizedUpdate mask_update(const QuantizedUpdate& update, std::span<const PeerSeed> peers) {
  QuantizedUpdate out = update;
  for (const PeerSeed& peer : peers) {
    if (peer.peer_id == update.client_id)
      throw InvalidParams("mask_update: peer list includes self");
    std::vector<uint64_t> mask = derive_mask(peer.seed, update.round, out.coords.size());
    if (update.client_id < peer.peer_id) {
      for (size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += mask[i];
    } else {
      for (size_t i = 0; i < out.coords.size(); ++i) out.coords[i] -= mask[i];
    }
  }
  return out;
}

std::vector<double> aggregate(std::span<const QuantizedUpdate> updates,
                              std::span<const uint32_t> expected_roster) {
  if (updates.empty()) throw RosterIncomplete("aggregate: no updates");
  std::set<uint32_t> expected(expected_roster.begin(), expected_roster.end());
  std::set<uint32_t> got;
  for (const auto& u : updates) got.insert(u.client_id);
  if (got != expected)
    throw RosterIncomplete("aggregate: client set does not match the expected roster");

  const size_t dim = updates.front().coords.size();
  const uint64_t scale = updates.front().scale;
  const uint32_t round = updates.front().round;
  for (const auto& u : updates) {
    if (u.coords.size() != dim) throw InvalidParams("aggregate: dimension mismatch");
    if (u.scale != scale) throw InvalidParams("aggregate: scale mismatch");
    if (u.round != round) throw InvalidParams("aggregate: round mismatch");
  }

  std::vector<uint64_t> sum(dim, 0);
  for (const auto& u : updates)
    for (size_t i = 0; i < dim; ++i) sum[i] += u.coords[i];
  return dequantize(sum, scale);
}

}  // namespace legion
