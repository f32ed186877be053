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

#include <map>
#include <string>

#include "tnet/audio.hpp"
#include "tnet/train.hpp"

namespace tnet {

/// section -> key -> raw value. Lines look like `key = value` under
/// `[section]` headers; `#` and `;` start comments. Keys before any
/// header land in the "" section.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

/// Everything the pipeline tools share. Defaults are sized for the
/// bundled synthetic corpus.
struct PipelineConfig {
  MelConfig mel;
  TrainConfig duration_train;
  TrainConfig mel_train;
  std::string head = "l2";  // "l2" or "xe"
  int griffin_lim_iters = 60;
  double speed = 1.0;
  uint64_t seed = 1234;
};

/// Applies a parsed file over the defaults. Unknown sections or keys and
/// unparsable values raise InvalidArgument naming the offender.
PipelineConfig pipeline_from_config(const ConfigMap& cfg);

}  // namespace tnet
