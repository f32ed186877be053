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

#include "tnet/audio.hpp"
#include "tnet/rng.hpp"

namespace tnet {

/// Inverts a log-mel matrix to linear magnitudes, frame-major
/// [T x (fft/2 + 1)]: exp, then the filterbank transpose with columns
/// normalized by their weight sums.
std::vector<double> mel_to_linear(const MelSpectrogram& mel);

/// Windowed overlap-add of complex frames [T x (fft/2 + 1)], normalized by
/// the summed squared synthesis window. Inverse of stft() up to edge taper.
Waveform istft(const std::vector<std::complex<double>>& frames, int64_t T,
               const MelConfig& cfg);

/// Phase reconstruction by alternating projection. The rng seeds the initial
/// phases; iterations = 0 emits the random-phase estimate directly. Output
/// samples are finite and clipped to [-1, 1].
Waveform griffin_lim(const MelSpectrogram& mel, int iterations, Rng& rng);

}  // namespace tnet
