/*
 * Copyright 2026 The mhtune Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <benchmark/benchmark.h>

#include <vector>

#include "mhtune/sampler.hpp"
#include "mhtune/tuning.hpp"

namespace {

using namespace mhtune;

// 7 x 5 points around the optimum of the normal IMH problem.
const GridSpec& small_grid() {
  static const GridSpec g = GridSpec::parse("m=-0.3:0.3:0.1,s=0.8:1.2:0.1");
  return g;
}

void tune_grid(benchmark::State& state, bool serial) {
  const Density pi = parse_density("normal:0,1");
  const Density mu = parse_density("normal:1,2");
  const ProposalFamily family = ProposalFamily::parse("imh:normal:m,s");
  TuningOptions opts;
  opts.serial = serial;
  opts.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = tune_single(pi, family, mu, BoundMethod::lb_variational, small_grid(), {}, opts);
    benchmark::DoNotOptimize(r.max_value);
  }
}

void chain_ensemble(benchmark::State& state, bool serial) {
  const Density pi = parse_density("normal:0,1");
  const Proposal prop = Proposal::independent(parse_density("normal:2,0.5"));
  const std::vector<std::size_t> ns = {100, 1000};
  CurveOptions opts;
  opts.serial = serial;
  opts.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = convergence_curve(pi, prop, 0.05, ns, 64, 7, opts);
    benchmark::DoNotOptimize(c.points.back().fraction);
  }
}

void BM_GridSerial(benchmark::State& s) { tune_grid(s, true); }
void BM_GridOpenMP(benchmark::State& s) { tune_grid(s, false); }
void BM_ChainsSerial(benchmark::State& s) { chain_ensemble(s, true); }
void BM_ChainsOpenMP(benchmark::State& s) { chain_ensemble(s, false); }

}  // namespace

BENCHMARK(BM_GridSerial)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainsSerial)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainsOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
