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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tnet/audio.hpp"
#include "tnet/models.hpp"
#include "tnet/optim.hpp"

namespace tnet {

inline constexpr uint32_t kCheckpointVersion = 1;

/// Mid-run counters carried by a checkpoint so training can resume and
/// replay bit-for-bit: epoch and step counters, the optimizer clock and
/// the full data/dropout rng state.
struct TrainResumeState {
  bool present = false;
  int64_t epoch = 0;
  int64_t global_step = 0;
  int64_t adam_t = 0;
  std::array<uint64_t, 4> rng_state{};
  LrSchedule schedule;
};

/// In-memory image of a model file: architecture description, vocabulary,
/// analysis settings and named tensors (parameters, batch-norm running
/// stats and optionally optimizer moments). Values are stored as f32
/// on disk; saving the same image twice yields identical bytes.
struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  std::string kind;  // "duration" or "mel"
  std::string head;  // "l2", "xe" or empty
  int embed_dim = 0;
  int n_mels = 0;
  std::vector<BlockSpec> blocks;
  std::vector<char32_t> vocabulary;
  MelConfig mel;
  uint64_t seed = 0;
  TrainResumeState train;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
/// Raises IoError on bad magic, a version mismatch or truncation.
Checkpoint load_checkpoint(const std::string& path);

Checkpoint checkpoint_from(DurationPredictor& m);
Checkpoint checkpoint_from(MelGenerator& m);

/// Rebuilds the model described by the checkpoint and loads every
/// parameter and running statistic. Missing or extra tensors raise
/// IoError.
DurationPredictor duration_predictor_from(const Checkpoint& ck);
MelGenerator mel_generator_from(const Checkpoint& ck);

/// Optimizer moments travel as `opt.m.<param>` / `opt.v.<param>` tensors.
void append_optimizer_state(Checkpoint& ck, Adam& opt,
                            std::vector<NamedParam> params);
/// True when the checkpoint carried optimizer state.
bool restore_optimizer_state(const Checkpoint& ck, Adam& opt,
                             std::vector<NamedParam> params);

}  // namespace tnet
