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

#include "tnet/griffin_lim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tnet/error.hpp"

namespace tnet {

std::vector<double> mel_to_linear(const MelSpectrogram& mel) {
  const MelConfig& cfg = mel.config;
  const int bins = cfg.resolved_fft_size() / 2 + 1;
  const std::vector<double> fb = mel_filterbank(cfg);

  // Per-bin filter mass; bins no filter touches stay silent.
  std::vector<double> colsum(bins, 0.0);
  for (int m = 0; m < cfg.n_mels; ++m)
    for (int b = 0; b < bins; ++b)
      colsum[b] += fb[static_cast<size_t>(m) * bins + b];

  std::vector<double> lin(static_cast<size_t>(mel.frames) * bins, 0.0);
  for (int64_t t = 0; t < mel.frames; ++t) {
    for (int m = 0; m < cfg.n_mels; ++m) {
      // A poorly trained generator can emit log energies past exp's double
      // range. Full-scale audio stays under ~15, so the cap only engages on
      // pathological output and keeps the inversion finite.
      const double e = std::exp(std::min(mel.at(t, m), 30.0));
      const double* row = fb.data() + static_cast<size_t>(m) * bins;
      double* out = lin.data() + static_cast<size_t>(t) * bins;
      for (int b = 0; b < bins; ++b) out[b] += row[b] * e;
    }
    for (int b = 0; b < bins; ++b)
      if (colsum[b] > 0.0)
        lin[static_cast<size_t>(t) * bins + b] /= colsum[b];
  }
  return lin;
}

Waveform istft(const std::vector<std::complex<double>>& frames, int64_t T,
               const MelConfig& cfg) {
  const int win = cfg.win_length();
  const int hop = cfg.hop_length();
  const int fft = cfg.resolved_fft_size();
  const int bins = fft / 2 + 1;
  if (T <= 0 || frames.size() != static_cast<size_t>(T) * bins)
    throw InvalidArgument("istft frame buffer does not match frame count");
  const std::vector<double> window = hann_window(win);

  const int64_t len = (T - 1) * static_cast<int64_t>(hop) + win;
  std::vector<double> num(len, 0.0), den(len, 0.0);
  std::vector<std::complex<double>> buf(fft);
  for (int64_t t = 0; t < T; ++t) {
    const std::complex<double>* f = frames.data() + static_cast<size_t>(t) * bins;
    for (int b = 0; b < bins; ++b) buf[b] = f[b];
    for (int b = bins; b < fft; ++b) buf[b] = std::conj(f[fft - b]);
    fft_radix2(buf, true);
    const int64_t start = t * hop;
    for (int i = 0; i < win; ++i) {
      num[start + i] += window[i] * buf[i].real();
      den[start + i] += window[i] * window[i];
    }
  }

  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(len);
  for (int64_t i = 0; i < len; ++i)
    out.samples[i] = den[i] > 1e-10 ? num[i] / den[i] : 0.0;
  return out;
}

Waveform griffin_lim(const MelSpectrogram& mel, int iterations, Rng& rng) {
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  const MelConfig& cfg = mel.config;
  const int bins = cfg.resolved_fft_size() / 2 + 1;
  const int64_t T = mel.frames;
  const std::vector<double> mag = mel_to_linear(mel);

  std::vector<std::complex<double>> spec(static_cast<size_t>(T) * bins);
  for (size_t i = 0; i < spec.size(); ++i) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    spec[i] = std::polar(mag[i], phi);
  }

  for (int it = 0; it < iterations; ++it) {
    const Waveform est = istft(spec, T, cfg);
    int64_t frames = 0;
    const std::vector<std::complex<double>> re = stft(est, cfg, &frames);
    if (frames != T) throw Error("griffin-lim frame count drifted");
    for (size_t i = 0; i < spec.size(); ++i) {
      const double a = std::abs(re[i]);
      spec[i] = a > 0.0 ? re[i] / a * mag[i] : std::complex<double>(mag[i]);
    }
  }

  Waveform out = istft(spec, T, cfg);
  for (double& s : out.samples) {
    if (!std::isfinite(s)) throw Error("griffin-lim produced non-finite audio");
    s = std::clamp(s, -1.0, 1.0);
  }
  return out;
}

}  // namespace tnet
