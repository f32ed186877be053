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

#include <memory>
#include <string>
#include <vector>

#include "tnet/audio.hpp"
#include "tnet/ops.hpp"
#include "tnet/rng.hpp"
#include "tnet/tensor.hpp"
#include "tnet/textproc.hpp"

namespace tnet {

/// One convolutional stage: sub_blocks repetitions of depthwise k +
/// pointwise 1x1 + batch norm + ReLU + dropout at a fixed channel width.
/// When residual is set, a projected skip joins in before the last
/// sub-block's activation.
struct BlockSpec {
  int sub_blocks = 1;
  int channels = 256;
  int kernel = 3;
  double dropout = 0.1;
  bool residual = true;
};

struct Conv1dLayer {
  Tensor weight;
  Tensor bias;  // undefined = no bias
  int kernel = 1;
  int groups = 1;
};

struct BatchNormLayer {
  Tensor gamma;
  Tensor beta;
  BatchNormState state;
};

struct SubBlock {
  Conv1dLayer depthwise;
  Conv1dLayer pointwise;
  BatchNormLayer norm;
};

struct ConvBlock {
  BlockSpec spec;
  std::vector<SubBlock> subs;
  // Skip path, always projected: pointwise conv + batch norm.
  Conv1dLayer proj;
  BatchNormLayer proj_norm;
};

struct NamedParam {
  std::string name;
  Tensor tensor;
};

struct NamedBuffer {
  std::string name;
  std::vector<double>* data;
};

enum class DurationHead { L2, XE };

/// Class layout of the XE duration head: ids 0..15 are the durations
/// themselves, 16..31 are geometric buckets spanning (16, 512]; longer
/// durations clamp into the last bucket.
inline constexpr int kDurationClasses = 32;
int duration_to_class(int64_t d);
int64_t class_to_duration(int cls);

/// Predicts one duration per blank-interleaved token. L2 head regresses
/// log(1 + d) as a [1 x L] map; XE emits [kDurationClasses x L] logits.
struct DurationPredictor {
  std::shared_ptr<const Vocabulary> vocab;
  DurationHead head_kind = DurationHead::L2;
  int embed_dim = 0;
  Tensor embedding;  // V x D
  std::vector<ConvBlock> blocks;
  Conv1dLayer head;

  std::vector<NamedParam> parameters();
  std::vector<NamedBuffer> buffers();
  int64_t parameter_count();
};

/// Maps a duration-expanded embedding [D x L] to a log-mel sequence
/// [n_mels x L].
struct MelGenerator {
  std::shared_ptr<const Vocabulary> vocab;
  int embed_dim = 0;
  int n_mels = 80;
  Tensor embedding;  // V x D, consumed through embed_expanded
  std::vector<ConvBlock> blocks;
  Conv1dLayer head;

  std::vector<NamedParam> parameters();
  std::vector<NamedBuffer> buffers();
  int64_t parameter_count();
};

std::vector<BlockSpec> default_duration_blocks();
std::vector<BlockSpec> default_mel_blocks();

DurationPredictor build_duration_predictor(
    DurationHead head, std::shared_ptr<const Vocabulary> vocab, Rng& rng,
    int embed_dim = 64, std::vector<BlockSpec> blocks = {});
MelGenerator build_mel_generator(std::shared_ptr<const Vocabulary> vocab,
                                 Rng& rng, int embed_dim = 256,
                                 int n_mels = 80,
                                 std::vector<BlockSpec> blocks = {});

/// Head output for a blank-interleaved sequence. The rng feeds dropout;
/// Eval and Calibrate modes draw nothing from it.
Tensor predict_durations(DurationPredictor& m, const TokenSequence& tokens,
                         Mode mode, Rng& rng);

/// Head output to integer durations, one per token. speed > 1 shortens
/// durations, < 1 stretches them (applied before rounding). Characters
/// never decode to zero; blanks may.
std::vector<int64_t> decode_durations(const Tensor& head_out,
                                      DurationHead kind,
                                      const TokenSequence& tokens,
                                      double speed = 1.0);

/// Stack forward on an already-expanded embedding [D x L].
Tensor mel_forward(MelGenerator& m, const Tensor& expanded, Mode mode,
                   Rng& rng);

/// mel_forward wrapped into the frame-major mel container.
MelSpectrogram generate_mel(MelGenerator& m, const Tensor& expanded,
                            const MelConfig& cfg);

}  // namespace tnet
