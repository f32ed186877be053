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

#include "tnet/synth_corpus.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "tnet/error.hpp"

namespace tnet {

namespace {

int64_t rand_int(Rng& r, int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(r.next_u64() % (hi - lo + 1));
}

}  // namespace

double synth_tone_hz(char32_t c) {
  if (c < U'a' || c > U'z') return 0.0;
  return 220.0 * std::pow(2.0, static_cast<int>(c - U'a') / 12.0);
}

MelConfig synth_default_mel_config() {
  MelConfig cfg;
  cfg.sample_rate = 16000;
  cfg.window_ms = 50.0;
  cfg.hop_ms = 12.5;
  cfg.n_mels = 80;
  return cfg;
}

std::vector<SynthUtterance> synth_corpus(int n, const Rng& rng,
                                         const MelConfig& cfg) {
  if (n <= 0) throw InvalidArgument("corpus size must be positive");
  const int hop = cfg.hop_length();
  const int win = cfg.win_length();

  std::vector<SynthUtterance> corpus;
  corpus.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng r = rng.fork(static_cast<uint64_t>(i));
    SynthUtterance u;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth_%04d", i);
    u.name = buf;

    const int64_t words = rand_int(r, 1, 2);
    std::vector<char32_t> chars;
    for (int64_t w = 0; w < words; ++w) {
      if (w > 0) chars.push_back(U' ');
      const int64_t len = rand_int(r, 2, 5);
      for (int64_t k = 0; k < len; ++k)
        chars.push_back(static_cast<char32_t>(U'a' + rand_int(r, 0, 9)));
    }
    u.transcript = utf8_encode(chars);

    const int64_t N = static_cast<int64_t>(chars.size());
    DurationMap& d = u.oracle;
    d.tokens.resize(2 * N + 1, kBlankChar);
    d.durations.assign(2 * N + 1, 0);
    for (int64_t k = 0; k < N; ++k) d.tokens[2 * k + 1] = chars[k];
    // Interior blanks stay >= 1 so identical neighbors never merge in the
    // decoded path; edge blanks may be empty.
    for (int64_t k = 0; k < 2 * N + 1; ++k) {
      if (k % 2 == 1)
        d.durations[k] = rand_int(r, 2, 6);
      else if (k == 0 || k == 2 * N)
        d.durations[k] = rand_int(r, 0, 3);
      else
        d.durations[k] = rand_int(r, 1, 3);
    }
    for (int64_t k = 0; k < 2 * N + 1; ++k)
      d.total_frames += d.durations[k];
    d.validate();

    // Each frame owns hop samples; the tail pad makes the analysis frame
    // count land exactly on the duration total.
    u.audio.sample_rate = cfg.sample_rate;
    u.audio.samples.reserve(d.total_frames * hop + (win - hop));
    for (int64_t k = 0; k < 2 * N + 1; ++k) {
      const double hz = synth_tone_hz(d.tokens[k]);
      const int64_t len = d.durations[k] * hop;
      for (int64_t s = 0; s < len; ++s) {
        double v = 0.0;
        if (hz > 0.0) {
          v = 0.3 * std::sin(2.0 * std::numbers::pi * hz * s /
                             cfg.sample_rate);
          const int64_t ramp = 32;  // short fade against clicks
          if (s < ramp) v *= static_cast<double>(s) / ramp;
          if (len - 1 - s < ramp)
            v *= static_cast<double>(len - 1 - s) / ramp;
        }
        u.audio.samples.push_back(v);
      }
    }
    u.audio.samples.resize(d.total_frames * hop + (win - hop), 0.0);

    if (mel_frame_count(static_cast<int64_t>(u.audio.samples.size()), cfg) !=
        d.total_frames)
      throw Error("synthetic utterance frame count mismatch");
    corpus.push_back(std::move(u));
  }
  return corpus;
}

CtcMatrix oracle_ctc_matrix(const DurationMap& d) {
  d.validate();
  const auto vocab = Vocabulary::standard();
  CtcMatrix m;
  m.frames = d.total_frames;
  m.vocabulary = vocab->symbols();
  m.scores.assign(static_cast<size_t>(m.frames) * vocab->size(), 0.0f);
  int64_t t = 0;
  for (size_t i = 0; i < d.tokens.size(); ++i) {
    const int id = vocab->id_of(d.tokens[i]);
    for (int64_t k = 0; k < d.durations[i]; ++k, ++t)
      m.scores[static_cast<size_t>(t) * vocab->size() + id] = 1.0f;
  }
  if (t != m.frames) throw Error("oracle matrix frame mismatch");
  return m;
}

}  // namespace tnet
