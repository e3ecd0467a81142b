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

#include "legion/netsim.hpp"

namespace {

class Sink : public legion::SimNode {
 public:
  void on_message(legion::Simulator&, uint32_t, const legion::Bytes&, uint64_t) override {}
};

void BM_SendDeliver(benchmark::State& state) {
  for (auto _ : state) {
    legion::NetworkConfig c;
    c.drop_prob = 0.05;
    c.dup_prob = 0.02;
    c.delay_min = 1;
    c.delay_max = 20;
    c.gst = 500;
    c.delta_bound = 5;
    c.seed = 42;
    legion::Simulator sim(c);
    Sink nodes[4];
    for (uint32_t i = 0; i < 4; ++i) sim.register_node(i, &nodes[i]);
    for (int i = 0; i < state.range(0); ++i)
      sim.send(i % 4, (i + 1) % 4, {uint8_t(i), uint8_t(i >> 8)});
    sim.run_until(1000000);
    benchmark::DoNotOptimize(sim.trace().size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SendDeliver)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
