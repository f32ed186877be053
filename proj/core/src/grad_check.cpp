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

#include "tnet/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "tnet/error.hpp"

namespace tnet {

namespace {

double check_coords(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                    double step,
                    const std::vector<std::vector<int64_t>>& coords) {
  if (precision() != Precision::F64)
    throw InvalidArgument("grad_check requires the F64 precision mode");
  for (const auto& in : inputs) {
    Tensor t = in;
    t.set_requires_grad(true);
    t.zero_grad();
  }
  Tensor out = fn(inputs);
  out.backward();
  std::vector<std::vector<double>> analytic(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor t = inputs[i];
    analytic[i].assign(t.grad().begin(), t.grad().end());
  }

  NoGradGuard no_grad;  // finite differences only need values
  double max_rel = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor t = inputs[i];
    auto vals = t.values();
    for (int64_t j : coords[i]) {
      const double saved = vals[j];
      vals[j] = saved + step;
      const double f_plus = fn(inputs).item();
      vals[j] = saved - step;
      const double f_minus = fn(inputs).item();
      vals[j] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * step);
      const double a = analytic[i][j];
      const double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace

double grad_check(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                  double step) {
  std::vector<std::vector<int64_t>> coords(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    coords[i].resize(static_cast<size_t>(inputs[i].numel()));
    for (int64_t j = 0; j < inputs[i].numel(); ++j) coords[i][j] = j;
  }
  return check_coords(fn, inputs, step, coords);
}

double grad_check_sampled(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                          double step, int64_t coords_per_tensor, Rng& rng) {
  std::vector<std::vector<int64_t>> coords(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    const int64_t n = inputs[i].numel();
    if (n <= coords_per_tensor) {
      coords[i].resize(static_cast<size_t>(n));
      for (int64_t j = 0; j < n; ++j) coords[i][j] = j;
    } else {
      for (int64_t j = 0; j < coords_per_tensor; ++j)
        coords[i].push_back(rng.uniform_int(0, n - 1));
    }
  }
  return check_coords(fn, inputs, step, coords);
}

}  // namespace tnet
