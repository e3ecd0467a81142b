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

#include "legion/privacy.hpp"

namespace {

void BM_RdpStep(benchmark::State& state) {
  int alpha = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::rdp_step(0.01, 1.0, alpha));
  }
}
BENCHMARK(BM_RdpStep)->Arg(8)->Arg(64)->Arg(512);

void BM_ComposeFullGrid(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::compose(legion::RdpCurve{}, 0.01, 1.0, state.range(0)));
  }
}
BENCHMARK(BM_ComposeFullGrid)->Arg(1)->Arg(1000);

void BM_CalibrateSigma(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(legion::calibrate_sigma(0.01, 1000, 1e-5, 1.64));
  }
}
BENCHMARK(BM_CalibrateSigma);

}  // namespace
