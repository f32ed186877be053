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

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace tnet {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Short-time analysis settings. Window and hop are specified in
/// milliseconds and rounded to samples; fft_size must be a power of two at
/// least the window length (0 picks the smallest such power).
struct MelConfig {
  int sample_rate = 16000;
  double window_ms = 50.0;
  double hop_ms = 12.5;
  int n_mels = 80;
  int fft_size = 0;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 = sample_rate / 2
  double log_floor = 1e-5;

  int win_length() const;
  int hop_length() const;
  int resolved_fft_size() const;
  double resolved_fmax() const;
};

/// Log-mel matrix, frame-major: entry(t, m) for frame t, band m. Entries
/// are natural logs, floored at log(log_floor).
struct MelSpectrogram {
  std::vector<double> data;
  int64_t frames = 0;
  int n_mels = 0;
  MelConfig config;

  double& at(int64_t t, int m) { return data[t * n_mels + m]; }
  double at(int64_t t, int m) const { return data[t * n_mels + m]; }
};

/// Frames that fit without padding: 1 + floor((len - win) / hop).
int64_t mel_frame_count(int64_t num_samples, const MelConfig& cfg);

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filterbank, row-major [n_mels x (fft/2 + 1)], peak height 1.
std::vector<double> mel_filterbank(const MelConfig& cfg);

/// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

/// Magnitude STFT, frame-major [T x (fft/2 + 1)], no centering.
std::vector<std::complex<double>> stft(const Waveform& w, const MelConfig& cfg,
                                       int64_t* out_frames);

/// Hann -> magnitude STFT -> triangular mel filterbank -> natural log with
/// floor clamp.
MelSpectrogram mel_spectrogram(const Waveform& w, const MelConfig& cfg);

}  // namespace tnet
