// Copyright 2026 The Sledger Authors
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
#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "sledger/consensus.hpp"
#include "sledger/node.hpp"

namespace {

using namespace sledger;

// range(0): entries, range(1): key space (smaller = more conflicts).
void BM_PartitionConflicts(benchmark::State& state) {
  auto entries = bench::writes(static_cast<std::size_t>(state.range(0)),
                               static_cast<std::uint32_t>(state.range(1)));
  std::size_t lanes = 0;
  for (auto _ : state) {
    auto schedule = consensus::partition_conflicts(entries);
    lanes = schedule.size();
    benchmark::DoNotOptimize(schedule);
  }
  state.counters["lanes"] = static_cast<double>(lanes);
  state.SetItemsProcessed(state.range(0) * static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_PartitionConflicts)->Args({900, 10})->Args({900, 1000})->Args({900, 100000});

// range(0): apply threads.
void BM_ApplyBlockState(benchmark::State& state) {
  auto block = bench::block_of(bench::writes(900, 100000));
  for (auto _ : state) {
    substrate::KVStore store;
    consensus::apply_block_state(store, consensus::kStatePrefix, block,
                                 static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(store);
  }
  state.SetItemsProcessed(900 * static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ApplyBlockState)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_Threshold(benchmark::State& state) {
  std::size_t acc = 0;
  for (auto _ : state) {
    for (std::size_t n = 1; n <= 64; ++n) acc += consensus::threshold(ledger::PolicyMode::bft_majority, n);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Threshold);

}  // namespace
