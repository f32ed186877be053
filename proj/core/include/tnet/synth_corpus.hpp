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

#include <string>
#include <vector>

#include "tnet/audio.hpp"
#include "tnet/ctc_align.hpp"
#include "tnet/rng.hpp"

namespace tnet {

/// One generated utterance. The audio is a deterministic tone sequence,
/// one tone per character; oracle durations are blank-interleaved and sum
/// exactly to the mel frame count of the audio.
struct SynthUtterance {
  std::string name;
  std::string transcript;
  Waveform audio;
  DurationMap oracle;
};

/// Frequency used for a letter's tone.
double synth_tone_hz(char32_t c);

MelConfig synth_default_mel_config();

/// Deterministic corpus of n utterances; utterance i depends only on
/// rng.fork(i) so corpora of different sizes share a prefix. Transcripts
/// use the letters a-j and spaces. Interior blanks always get at least one
/// frame, so the one-hot oracle CTC matrix decodes back to the exact
/// oracle durations.
std::vector<SynthUtterance> synth_corpus(int n, const Rng& rng,
                                         const MelConfig& cfg);

/// One-hot CTC score matrix whose greedy decoding replays the duration
/// map exactly. Columns cover the standard symbol set.
CtcMatrix oracle_ctc_matrix(const DurationMap& d);

}  // namespace tnet
