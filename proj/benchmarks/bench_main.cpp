// Copyright     2026  The cough-ep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "coughep/endpointing.hpp"
#include "coughep/evaluation.hpp"
#include "coughep/features.hpp"

using namespace coughep;

namespace {

IntervalScores RandomIntervals(std::int64_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IntervalScores iv;
  for (std::int64_t i = 0; i < n; ++i) {
    iv.scores.push_back(u(rng));
    iv.labels.push_back(rng() % 10 == 0);
  }
  return iv;
}

void BM_AucAp(benchmark::State& state) {
  const IntervalScores iv = RandomIntervals(state.range(0));
  for (auto _ : state) {
    const Curve c = RocCurve(iv);
    benchmark::DoNotOptimize(Auc(c) + AveragePrecision(c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AucAp)->Arg(10'000)->Arg(1'000'000);

void BM_MelSpectrogram(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<float> nd(0.0f, 0.1f);
  Waveform w;
  w.samples.resize(static_cast<std::size_t>(16000 * state.range(0)));
  for (auto& s : w.samples) s = nd(rng);
  const MelConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ComputeMelSpectrogram(w, cfg));
  state.SetLabel(std::to_string(state.range(0)) + "s of audio");
}
BENCHMARK(BM_MelSpectrogram)->Arg(1)->Arg(30);

void BM_MedianFilter(benchmark::State& state) {
  std::mt19937_64 rng(3);
  BinarySequence b;
  b.bits.resize(100'000);
  for (auto& v : b.bits) v = rng() % 2;
  b.geometry = {160, 100, 100'000};
  const int width = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(MedianFilter(b, width));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_MedianFilter)->Arg(3)->Arg(9)->Arg(51);

}  // namespace

BENCHMARK_MAIN();
