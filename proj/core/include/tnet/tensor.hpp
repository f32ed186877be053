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
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tnet {

/// Global numeric mode. Values are held in double storage in both modes;
/// in F32 mode every op output, parameter and optimizer-state value is
/// rounded through IEEE binary32, so everything that reaches a checkpoint
/// is exactly representable as a 32-bit float. F64 mode (full double) is
/// required for finite-difference gradient checking.
enum class Precision { F32, F64 };

void set_precision(Precision p);
Precision precision();

/// Rounds through binary32 when the global mode is F32; identity otherwise.
double quantize(double x);
void quantize(std::span<double> xs);

namespace detail {

struct TensorImpl {
  std::vector<int64_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first use, same length as value
  bool requires_grad = false;
  // Reverse-mode closure: reads this->grad, accumulates into parents' grads.
  std::function<void(TensorImpl&)> backprop;
  std::vector<std::shared_ptr<TensorImpl>> parents;

  TensorImpl() = default;
  // Drains the tape iteratively; naive shared_ptr unwinding would recurse
  // once per node and overflow the stack on long op chains.
  ~TensorImpl();
  TensorImpl(const TensorImpl&) = delete;
  TensorImpl& operator=(const TensorImpl&) = delete;

  int64_t numel() const { return static_cast<int64_t>(value.size()); }
  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

/// While alive, ops do not record the backward graph. Used for inference
/// and benchmarking so intermediate activations are freed eagerly.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

bool grad_enabled();

/// N-dimensional array of doubles with an optional gradient buffer and a
/// reverse-mode tape. Copying a Tensor copies a handle to shared storage.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<int64_t> shape, double fill,
                     bool requires_grad = false);
  static Tensor from_data(std::vector<int64_t> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const std::vector<int64_t>& shape() const { return impl_->shape; }
  int64_t dim(size_t i) const { return impl_->shape[i]; }
  size_t rank() const { return impl_->shape.size(); }
  int64_t numel() const { return impl_->numel(); }

  std::span<double> values() { return impl_->value; }
  std::span<const double> values() const { return impl_->value; }
  double value_at(int64_t i) const { return impl_->value[i]; }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool b) { impl_->requires_grad = b; }
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<double> grad() {
    impl_->ensure_grad();
    return impl_->grad;
  }
  void zero_grad() {
    for (auto& g : impl_->grad) g = 0.0;
  }

  /// Value of a one-element tensor.
  double item() const;

  /// Reverse-mode sweep from a scalar root. Seeds d(root)/d(root) = 1.0
  /// and accumulates into the grad of every reachable tensor that
  /// requires gradients.
  void backward();

  std::shared_ptr<detail::TensorImpl> impl() const { return impl_; }
  static Tensor wrap(std::shared_ptr<detail::TensorImpl> impl);

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

namespace detail {

/// Builds an op result: quantizes in F32 mode and records the graph edge
/// when gradients are enabled and some parent requires them.
Tensor make_result(std::vector<int64_t> shape, std::vector<double> value,
                   std::vector<Tensor> parents,
                   std::function<void(TensorImpl&)> backprop);

}  // namespace detail

}  // namespace tnet
