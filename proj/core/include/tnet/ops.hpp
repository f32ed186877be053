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

#include <cstdint>
#include <vector>

#include "tnet/rng.hpp"
#include "tnet/tensor.hpp"

namespace tnet {

enum class Mode {
  Train,      // batch statistics, dropout active, running stats updated
  Eval,       // running statistics, dropout off
  Calibrate,  // batch statistics, dropout off, dataset stats accumulated
};

/// Per-layer batch-norm persistent state. Running statistics follow the
/// usual convention: normalization uses biased batch variance, the running
/// estimate accumulates the unbiased one.
struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  // Aggregators for Mode::Calibrate (exact dataset statistics).
  double calib_frames = 0.0;
  std::vector<double> calib_sum;
  std::vector<double> calib_sumsq;

  void init(int64_t channels);
  void reset_calibration();
  /// Replaces running statistics with the accumulated dataset statistics.
  void finalize_calibration();
};

/// 1D cross-correlation with symmetric "same" zero padding of (kernel-1)/2.
/// x is [C_in x T], weight is [C_out x C_in/groups x kernel], bias is
/// [C_out] or an undefined tensor for no bias. Output is [C_out x T].
/// Depthwise convolution is groups == C_in; pointwise is kernel == 1,
/// groups == 1.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int kernel, int groups);

/// Batch normalization over the time axis of a [C x T] tensor.
Tensor batch_norm1d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    BatchNormState& state, Mode mode);

Tensor relu(const Tensor& x);

/// Inverted dropout: train mode zeroes elements with probability p and
/// scales survivors by 1/(1-p); other modes are the identity and consume
/// no random draws (as does p == 0).
Tensor dropout(const Tensor& x, double p, Rng& rng, Mode mode);

/// Gathers table rows for each id; output is [D x T] with one column per
/// id. Gradients scatter-add back into the table.
Tensor embedding(const std::vector<int>& ids, const Tensor& table);

Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// Mean squared error over valid positions. The mask (empty = all valid)
/// marks columns of the last axis; every channel of a masked column is
/// excluded. Masked positions contribute exactly zero.
Tensor mse_loss(const Tensor& pred, const Tensor& target,
                const std::vector<uint8_t>& mask = {});

/// Cross entropy with log-softmax applied internally. logits is [K x T],
/// targets holds one class id per column, mask as in mse_loss.
Tensor xe_loss(const Tensor& logits, const std::vector<int>& targets,
               const std::vector<uint8_t>& mask = {});

}  // namespace tnet
