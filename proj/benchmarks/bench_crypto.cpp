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

#include "legion/merkle.hpp"
#include "legion/rng.hpp"
#include "legion/sha256.hpp"

namespace {

void BM_Sha256(benchmark::State& state) {
  legion::Rng rng(1);
  std::vector<uint8_t> data(state.range(0));
  rng.fill_bytes(data.data(), data.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::sha256(legion::ByteSpan(data.data(), data.size())));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Range(64, 1 << 16);

void BM_HmacSha256(benchmark::State& state) {
  legion::Rng rng(2);
  auto key = rng.key32();
  std::vector<uint8_t> data(state.range(0));
  rng.fill_bytes(data.data(), data.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::hmac_sha256(legion::ByteSpan(key.data(), key.size()),
                                                 legion::ByteSpan(data.data(), data.size())));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HmacSha256)->Range(64, 4096);

void BM_MerkleRoot(benchmark::State& state) {
  legion::Rng rng(3);
  std::vector<legion::Digest> leaves(state.range(0));
  for (auto& leaf : leaves) rng.fill_bytes(leaf.data(), leaf.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::merkle_root(leaves));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MerkleRoot)->Range(8, 4096);

void BM_ProveInclusion(benchmark::State& state) {
  legion::Rng rng(4);
  std::vector<legion::Digest> leaves(state.range(0));
  for (auto& leaf : leaves) rng.fill_bytes(leaf.data(), leaf.size());
  size_t index = leaves.size() / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::prove_inclusion(leaves, index));
  }
}
BENCHMARK(BM_ProveInclusion)->Range(8, 4096);

}  // namespace
