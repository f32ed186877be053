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
#include <vector>

#include "tnet/rng.hpp"
#include "tnet/tensor.hpp"

namespace tnet {

/// Scalar-valued function of the checked tensors. Must be deterministic:
/// two calls with the same input values produce the same output.
using ScalarFn = std::function<Tensor(const std::vector<Tensor>&)>;

/// Compares the analytic gradient of fn with central finite differences,
/// element by element, and returns the maximum relative error
/// |a - n| / max(|a|, |n|, 1e-8). Requires the F64 precision mode.
double grad_check(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                  double step = 1e-3);

/// Same check restricted to a random sample of coordinates per tensor,
/// for inputs too large to difference exhaustively.
double grad_check_sampled(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                          double step, int64_t coords_per_tensor, Rng& rng);

}  // namespace tnet
