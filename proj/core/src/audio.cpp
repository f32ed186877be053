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

#include "tnet/audio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tnet/error.hpp"

namespace tnet {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

int MelConfig::win_length() const {
  return static_cast<int>(std::lround(window_ms * 1e-3 * sample_rate));
}

int MelConfig::hop_length() const {
  return static_cast<int>(std::lround(hop_ms * 1e-3 * sample_rate));
}

int MelConfig::resolved_fft_size() const {
  const int win = win_length();
  if (fft_size == 0) return next_pow2(win);
  if (!is_pow2(fft_size))
    throw InvalidArgument("fft_size " + std::to_string(fft_size) +
                          " is not a power of two");
  if (fft_size < win)
    throw InvalidArgument("fft_size " + std::to_string(fft_size) +
                          " is smaller than the window length " +
                          std::to_string(win));
  return fft_size;
}

double MelConfig::resolved_fmax() const {
  return fmax > 0.0 ? fmax : sample_rate / 2.0;
}

int64_t mel_frame_count(int64_t num_samples, const MelConfig& cfg) {
  const int win = cfg.win_length();
  const int hop = cfg.hop_length();
  if (win <= 0 || hop <= 0)
    throw InvalidArgument("window and hop must be positive");
  if (num_samples < win)
    throw InvalidArgument("waveform with " + std::to_string(num_samples) +
                          " samples is shorter than one window (" +
                          std::to_string(win) + ")");
  return 1 + (num_samples - win) / hop;
}

std::vector<double> hann_window(int n) {
  if (n <= 0) throw InvalidArgument("window length must be positive");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_filterbank(const MelConfig& cfg) {
  const int fft = cfg.resolved_fft_size();
  const int bins = fft / 2 + 1;
  const double fmax = cfg.resolved_fmax();
  if (cfg.n_mels <= 0) throw InvalidArgument("n_mels must be positive");
  if (cfg.fmin < 0.0 || fmax <= cfg.fmin || fmax > cfg.sample_rate / 2.0)
    throw InvalidArgument("invalid mel frequency range [" +
                          std::to_string(cfg.fmin) + ", " +
                          std::to_string(fmax) + "]");

  // n_mels + 2 edges evenly spaced on the mel scale.
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges_hz(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edges_hz[i] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

  std::vector<double> fb(static_cast<size_t>(cfg.n_mels) * bins, 0.0);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / fft;
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges_hz[m], center = edges_hz[m + 1],
                 hi = edges_hz[m + 2];
    for (int b = 0; b < bins; ++b) {
      const double f = b * bin_hz;
      double v = 0.0;
      if (f > lo && f < center)
        v = (f - lo) / (center - lo);
      else if (f >= center && f < hi)
        v = (hi - f) / (hi - center);
      fb[static_cast<size_t>(m) * bins + b] = v;
    }
  }
  return fb;
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(static_cast<int>(n)))
    throw InvalidArgument("fft size must be a power of two");

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

std::vector<std::complex<double>> stft(const Waveform& w, const MelConfig& cfg,
                                       int64_t* out_frames) {
  const int win = cfg.win_length();
  const int hop = cfg.hop_length();
  const int fft = cfg.resolved_fft_size();
  const int bins = fft / 2 + 1;
  const int64_t frames =
      mel_frame_count(static_cast<int64_t>(w.samples.size()), cfg);
  const std::vector<double> window = hann_window(win);

  std::vector<std::complex<double>> out(static_cast<size_t>(frames) * bins);
  std::vector<std::complex<double>> buf(fft);
  for (int64_t t = 0; t < frames; ++t) {
    const int64_t start = t * hop;
    for (int i = 0; i < win; ++i)
      buf[i] = w.samples[start + i] * window[i];
    std::fill(buf.begin() + win, buf.end(), std::complex<double>(0.0));
    fft_radix2(buf, false);
    for (int b = 0; b < bins; ++b)
      out[static_cast<size_t>(t) * bins + b] = buf[b];
  }
  if (out_frames) *out_frames = frames;
  return out;
}

MelSpectrogram mel_spectrogram(const Waveform& w, const MelConfig& cfg) {
  const int fft = cfg.resolved_fft_size();
  const int bins = fft / 2 + 1;
  int64_t frames = 0;
  const std::vector<std::complex<double>> spec = stft(w, cfg, &frames);
  const std::vector<double> fb = mel_filterbank(cfg);

  MelSpectrogram mel;
  mel.frames = frames;
  mel.n_mels = cfg.n_mels;
  mel.config = cfg;
  mel.data.assign(static_cast<size_t>(frames) * cfg.n_mels, 0.0);
  std::vector<double> mag(bins);
  for (int64_t t = 0; t < frames; ++t) {
    for (int b = 0; b < bins; ++b)
      mag[b] = std::abs(spec[static_cast<size_t>(t) * bins + b]);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      const double* row = fb.data() + static_cast<size_t>(m) * bins;
      for (int b = 0; b < bins; ++b) e += row[b] * mag[b];
      mel.at(t, m) = std::log(std::max(e, cfg.log_floor));
    }
  }
  return mel;
}

}  // namespace tnet
