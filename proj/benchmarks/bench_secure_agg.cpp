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

#include <benchmark/benchmark.h>

#include "legion/rng.hpp"
#include "legion/secure_agg.hpp"

namespace {

void BM_DeriveMask(benchmark::State& state) {
  legion::Rng rng(1);
  auto seed = rng.key32();
  size_t dim = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::derive_mask(seed, 3, dim));
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_DeriveMask)->Range(16, 1 << 14);

void BM_MaskAndAggregate(benchmark::State& state) {
  const uint32_t clients = static_cast<uint32_t>(state.range(0));
  const size_t dim = 1024;
  legion::Rng rng(2);
  std::vector<std::vector<std::array<uint8_t, 32>>> seeds(
      clients, std::vector<std::array<uint8_t, 32>>(clients));
  for (uint32_t i = 0; i < clients; ++i)
    for (uint32_t j = i + 1; j < clients; ++j) seeds[i][j] = rng.derive("pair", i, j).key32();
  std::vector<double> v(dim, 0.5);
  std::vector<uint32_t> roster;
  for (uint32_t c = 0; c < clients; ++c) roster.push_back(c);

  for (auto _ : state) {
    std::vector<legion::QuantizedUpdate> masked;
    for (uint32_t c = 0; c < clients; ++c) {
      legion::QuantizedUpdate qu{c, 1, legion::quantize(v), legion::kDefaultQuantScale};
      std::vector<legion::PeerSeed> peers;
      for (uint32_t j = 0; j < clients; ++j) {
        if (j == c) continue;
        peers.push_back({j, seeds[std::min(c, j)][std::max(c, j)]});
      }
      masked.push_back(legion::mask_update(qu, peers));
    }
    benchmark::DoNotOptimize(legion::aggregate(masked, roster));
  }
}
BENCHMARK(BM_MaskAndAggregate)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
