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

#include "tnet/optim.hpp"

#include <cmath>

#include "tnet/error.hpp"

namespace tnet {

int64_t LrSchedule::warmup_steps() const {
  return static_cast<int64_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
}

double lr_at(const LrSchedule& s, int64_t step) {
  if (step < 0) throw InvalidArgument("lr_at: negative step");
  if (step >= s.total_steps) return s.lr_min;
  const int64_t warmup = s.warmup_steps();
  if (step <= warmup)
    return warmup == 0 ? s.lr_max
                       : s.lr_max * (static_cast<double>(step) / static_cast<double>(warmup));
  const double progress = static_cast<double>(step - warmup) /
                          static_cast<double>(s.total_steps - warmup);
  return s.lr_min + 0.5 * (s.lr_max - s.lr_min) * (1.0 + std::cos(M_PI * progress));
}

double clip_global_norm(const std::vector<Tensor>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) {
    Tensor t = p;
    if (!t.has_grad()) continue;
    for (double g : t.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (const auto& p : params) {
      Tensor t = p;
      if (!t.has_grad()) continue;
      for (auto& g : t.grad()) g *= s;
    }
  }
  return norm;
}

void Adam::step(const std::vector<Tensor>& params, double lr) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(static_cast<size_t>(params[i].numel()), 0.0);
      v_[i].assign(static_cast<size_t>(params[i].numel()), 0.0);
    }
  }
  if (m_.size() != params.size())
    throw InvalidArgument("Adam: parameter list size changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor p = params[i];
    auto theta = p.values();
    auto grad = p.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (size_t j = 0; j < theta.size(); ++j) {
      const double g = grad[j];
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      theta[j] -= lr * (m_hat / (std::sqrt(v_hat) + eps_) + weight_decay_ * theta[j]);
      theta[j] = quantize(theta[j]);
      m[j] = quantize(m[j]);
      v[j] = quantize(v[j]);
    }
  }
}

void adam_step(const std::vector<Tensor>& params, double lr, double beta1,
               double beta2, double eps, double weight_decay) {
  Adam opt(beta1, beta2, eps, weight_decay);
  opt.step(params, lr);
}

}  // namespace tnet
