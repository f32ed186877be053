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

#include <functional>
#include <string>
#include <vector>

#include "tnet/checkpoint.hpp"
#include "tnet/ctc_align.hpp"
#include "tnet/griffin_lim.hpp"
#include "tnet/models.hpp"
#include "tnet/optim.hpp"

namespace tnet {

struct TrainConfig {
  int64_t epochs = 200;
  int64_t batch_size = 4;  // via gradient accumulation, no padding
  LrSchedule schedule;     // total_steps == 0 derives epochs * steps/epoch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 1e-6;
  double clip_norm = 1.0;
  double p_augment = 0.5;          // chance an item trains on jittered durations
  double augment_strength = 0.1;   // fraction of frames moved by the jitter
  uint64_t seed = 1234;
};

/// One optimizer step: loss is the batch mean, lr the rate it used.
struct TrainLogEntry {
  int64_t epoch = 0;
  int64_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct DurationItem {
  std::string name;
  TokenSequence tokens;  // blank-interleaved
  std::vector<int64_t> durations;
};

struct MelItem {
  std::string name;
  TokenSequence tokens;  // blank-interleaved
  std::vector<int64_t> durations;      // teacher durations, sum == frames
  std::vector<int64_t> alt_durations;  // optional substitute input durations
  MelSpectrogram target;
};

/// Builds a training item from an extracted duration map. Unknown symbols
/// map into the vocabulary's unknown id.
DurationItem make_duration_item(std::string name, const DurationMap& d,
                                std::shared_ptr<const Vocabulary> vocab);
/// Additionally checks that durations sum to the target frame count;
/// violations raise InvalidArgument so callers can reject the utterance.
MelItem make_mel_item(std::string name, const DurationMap& d,
                      MelSpectrogram target,
                      std::shared_ptr<const Vocabulary> vocab);

/// Total-conserving duration jitter: each adjacent pair trades up to
/// strength * min(pair) frames, never dropping a character below one
/// frame or a blank below zero.
std::vector<int64_t> augment_durations(const std::vector<int64_t>& durations,
                                       const TokenSequence& tokens,
                                       double strength, Rng& rng);

using EpochHook = std::function<void(int64_t epoch, double mean_loss)>;

/// Shared epoch loop: shuffled item order, gradient accumulation to the
/// batch size, global-norm clipping, Adam with the cosine schedule, and a
/// batch-norm calibration pass over the corpus after the last epoch.
/// A snapshot taken after epoch e and resumed replays the remaining
/// epochs bit-for-bit in F32 precision.
class DurationTrainer {
 public:
  DurationTrainer(DurationPredictor& model, std::vector<DurationItem> items,
                  TrainConfig cfg);
  /// Restores optimizer moments, counters and rng from a snapshot.
  void resume_from(const Checkpoint& ck);
  std::vector<TrainLogEntry> run(const EpochHook& hook = {});
  Checkpoint snapshot();
  const LrSchedule& schedule() const { return schedule_; }

 private:
  DurationPredictor& model_;
  std::vector<DurationItem> items_;
  TrainConfig cfg_;
  LrSchedule schedule_;
  Adam opt_;
  Rng rng_;
  int64_t epoch_done_ = 0;
  int64_t global_step_ = 0;
};

class MelTrainer {
 public:
  MelTrainer(MelGenerator& model, std::vector<MelItem> items, TrainConfig cfg,
             bool use_ground_truth_durations = true, bool augment = true);
  void resume_from(const Checkpoint& ck);
  std::vector<TrainLogEntry> run(const EpochHook& hook = {});
  Checkpoint snapshot();
  const LrSchedule& schedule() const { return schedule_; }

 private:
  const std::vector<int64_t>& input_durations(const MelItem& item) const;
  MelGenerator& model_;
  std::vector<MelItem> items_;
  TrainConfig cfg_;
  LrSchedule schedule_;
  Adam opt_;
  Rng rng_;
  bool use_ground_truth_;
  bool augment_;
  int64_t epoch_done_ = 0;
  int64_t global_step_ = 0;
};

std::vector<TrainLogEntry> train_duration(DurationPredictor& model,
                                          std::vector<DurationItem> items,
                                          const TrainConfig& cfg);
std::vector<TrainLogEntry> train_mel(MelGenerator& model,
                                     std::vector<MelItem> items,
                                     const TrainConfig& cfg,
                                     bool use_ground_truth_durations = true,
                                     bool augment = true);

/// Replaces batch-norm running statistics with exact activation statistics
/// over the corpus (dropout off). Closes the gap running estimates build
/// up when every training batch is a single sequence.
void calibrate_batchnorm(DurationPredictor& model,
                         const std::vector<DurationItem>& items);
void calibrate_batchnorm(MelGenerator& model,
                         const std::vector<MelItem>& items);

struct EvalReport {
  double mse = 0.0;           // frames^2, over all tokens
  double accuracy_pct = 0.0;  // exact duration matches, percent
  double within1_pct = 0.0;   // |P - T| <= 1, percent
  double within3_pct = 0.0;
  int64_t tokens = 0;
};

EvalReport duration_metrics(const std::vector<int64_t>& predicted,
                            const std::vector<int64_t>& reference);
EvalReport evaluate_durations(DurationPredictor& model,
                              const std::vector<DurationItem>& items);
/// Two tab-separated lines: a header and the values.
std::string format_eval(const EvalReport& r);

/// Per-item eval-mode losses against the teacher-expanded targets.
double mel_eval_mse(MelGenerator& model, const std::vector<MelItem>& items);

struct SynthesisResult {
  TokenSequence tokens;  // blank-interleaved
  std::vector<int64_t> durations;
  MelSpectrogram mel;
  Waveform audio;
};

/// Full inference path: tokenize, predict and decode durations at the
/// requested speed, expand, generate the mel, reconstruct audio.
SynthesisResult synthesize(const std::string& text, DurationPredictor& dur,
                           MelGenerator& mel, const MelConfig& cfg,
                           double speed = 1.0, int griffin_lim_iters = 60,
                           uint64_t seed = 0);

struct LatencyPoint {
  int64_t length = 0;       // input frames
  double seconds = 0.0;     // median wall time of one forward
  double frames_per_sec = 0.0;
};

struct LatencyReport {
  std::vector<LatencyPoint> points;
  /// Least-squares slope of log(time) over log(length); NaN under two
  /// points.
  double scaling_exponent = 0.0;
};

/// Times mel-generator forwards on random inputs of the given lengths.
LatencyReport benchmark_latency(MelGenerator& model,
                                std::vector<int64_t> lengths,
                                int repeats = 5, uint64_t seed = 0);

}  // namespace tnet
