// Copyright 2026 The tnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Microbenchmarks for the hot paths: convolution, the full mel stack at
// several lengths, duration extraction and Griffin-Lim reconstruction.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "tnet/ctc_align.hpp"
#include "tnet/griffin_lim.hpp"
#include "tnet/models.hpp"
#include "tnet/ops.hpp"
#include "tnet/synth_corpus.hpp"
#include "tnet/tensor.hpp"
#include "tnet/train.hpp"

using namespace tnet;

namespace {

Tensor randn(std::vector<int64_t> shape, Rng& rng) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = rng.normal();
  return Tensor::from_data(std::move(shape), std::move(v));
}

void BM_Conv1dDense(benchmark::State& state) {
  NoGradGuard no_grad;
  Rng rng(1);
  const Tensor x = randn({256, 256}, rng);
  const Tensor w = randn({256, 256, 5}, rng);
  const Tensor b = randn({256}, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(conv1d(x, w, b, 5, 1));
}

void BM_Conv1dSeparable(benchmark::State& state) {
  NoGradGuard no_grad;
  Rng rng(2);
  const Tensor x = randn({256, 256}, rng);
  const Tensor dw = randn({256, 1, 13}, rng);
  const Tensor pw = randn({256, 256, 1}, rng);
  for (auto _ : state) {
    const Tensor mid = conv1d(x, dw, Tensor(), 13, 256);
    benchmark::DoNotOptimize(conv1d(mid, pw, Tensor(), 1, 1));
  }
}

void BM_MelForward(benchmark::State& state) {
  NoGradGuard no_grad;
  Rng init(3);
  MelGenerator model = build_mel_generator(Vocabulary::standard(), init);
  Rng rng(4);
  const Tensor x = randn({model.embed_dim, state.range(0)}, rng);
  Rng dummy(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(mel_forward(model, x, Mode::Eval, dummy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DurationForward(benchmark::State& state) {
  NoGradGuard no_grad;
  const auto vocab = Vocabulary::standard();
  Rng init(5);
  DurationPredictor model =
      build_duration_predictor(DurationHead::XE, vocab, init);
  const TokenSequence tokens =
      insert_blanks(tokenize("the quick brown fox jumps over it", vocab));
  Rng dummy(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        predict_durations(model, tokens, Mode::Eval, dummy));
}

void BM_ExtractDurations(benchmark::State& state) {
  // 500-frame one-hot matrix for a 26-character transcript.
  const std::string transcript = "the quick brown fox jumps!";
  DurationMap d;
  d.tokens.push_back(U'~');
  for (char c : transcript) {
    d.tokens.push_back(static_cast<char32_t>(c == ' ' ? U' ' : c));
    d.tokens.push_back(U'~');
  }
  d.durations.assign(d.tokens.size(), 0);
  int64_t total = 0;
  for (size_t i = 0; i < d.tokens.size(); ++i) {
    d.durations[i] = i % 2 == 1 ? 12 : 7;
    total += d.durations[i];
  }
  d.durations[0] += 500 - total;
  d.total_frames = 500;
  const CtcMatrix m = oracle_ctc_matrix(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(extract_durations(m, transcript));
}

void BM_GriffinLim(benchmark::State& state) {
  const MelConfig cfg = synth_default_mel_config();
  Waveform tone;
  tone.sample_rate = cfg.sample_rate;
  tone.samples.resize(static_cast<size_t>(cfg.sample_rate));
  for (size_t i = 0; i < tone.samples.size(); ++i)
    tone.samples[i] = 0.5 * std::sin(2.0 * 3.14159265358979 * 440.0 *
                                     static_cast<double>(i) /
                                     cfg.sample_rate);
  const MelSpectrogram mel = mel_spectrogram(tone, cfg);
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(griffin_lim(mel, static_cast<int>(state.range(0)),
                                         rng));
  }
}

}  // namespace

BENCHMARK(BM_Conv1dDense)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv1dSeparable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MelForward)->Arg(128)->Arg(512)->Arg(2048)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DurationForward)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractDurations)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GriffinLim)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
