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
#include <string>
#include <vector>

#include "tnet/tensor.hpp"

namespace tnet {

/// Cosine decay with a linear warmup ramp from zero. lr(warmup_steps) is
/// exactly lr_max and lr(total_steps) is exactly lr_min.
struct LrSchedule {
  double lr_max = 1e-3;
  double lr_min = 1e-5;
  double warmup_fraction = 0.02;
  int64_t total_steps = 0;

  int64_t warmup_steps() const;
};

/// Learning rate at `step`; steps past total_steps clamp to lr_min.
double lr_at(const LrSchedule& schedule, int64_t step);

/// Scales all gradients by max_norm/norm when the joint L2 norm exceeds
/// max_norm. Returns the pre-clip global norm.
double clip_global_norm(const std::vector<Tensor>& params, double max_norm = 1.0);

/// Adam with bias correction and decoupled weight decay (an additive
/// lr * wd * theta term in the update).
class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
       double weight_decay = 1e-6)
      : beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {}

  /// One update over all params; call after backward. Moment buffers are
  /// keyed by parameter order, which must stay fixed across steps.
  void step(const std::vector<Tensor>& params, double lr);

  int64_t t() const { return t_; }
  void set_t(int64_t t) { t_ = t; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double eps() const { return eps_; }
  double weight_decay() const { return weight_decay_; }

  std::vector<std::vector<double>>& moments_m() { return m_; }
  std::vector<std::vector<double>>& moments_v() { return v_; }

 private:
  double beta1_, beta2_, eps_, weight_decay_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

/// Convenience wrapper matching the stateless call shape used in tests:
/// one bias-corrected Adam update on freshly initialized moments.
void adam_step(const std::vector<Tensor>& params, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8,
               double weight_decay = 1e-6);

}  // namespace tnet
