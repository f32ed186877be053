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

#include "tnet/audio.hpp"

namespace tnet {

/// Reads a 16-bit PCM mono RIFF/WAVE file; anything else raises IoError.
Waveform read_wav(const std::string& path);

/// Writes 16-bit PCM mono; samples are clipped to [-1, 1] before rounding.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace tnet
