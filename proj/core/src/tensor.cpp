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

#include "tnet/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "tnet/error.hpp"

namespace tnet {

namespace {

Precision g_precision = Precision::F32;
thread_local bool g_grad_enabled = true;

int64_t shape_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

}  // namespace

void set_precision(Precision p) { g_precision = p; }
Precision precision() { return g_precision; }

double quantize(double x) {
  if (g_precision == Precision::F32) return static_cast<double>(static_cast<float>(x));
  return x;
}

void quantize(std::span<double> xs) {
  if (g_precision != Precision::F32) return;
  for (auto& x : xs) x = static_cast<double>(static_cast<float>(x));
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

bool grad_enabled() { return g_grad_enabled; }

Tensor Tensor::zeros(std::vector<int64_t> shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<int64_t> shape, double fill, bool requires_grad) {
  auto impl = std::make_shared<detail::TensorImpl>();
  const int64_t n = shape_numel(shape);
  impl->shape = std::move(shape);
  impl->value.assign(static_cast<size_t>(n), quantize(fill));
  impl->requires_grad = requires_grad;
  return wrap(std::move(impl));
}

Tensor Tensor::from_data(std::vector<int64_t> shape, std::vector<double> data,
                         bool requires_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(data.size()))
    throw InvalidArgument("tensor data length does not match shape product");
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->value = std::move(data);
  quantize(impl->value);
  impl->requires_grad = requires_grad;
  return wrap(std::move(impl));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

Tensor Tensor::wrap(std::shared_ptr<detail::TensorImpl> impl) {
  Tensor t;
  t.impl_ = std::move(impl);
  return t;
}

double Tensor::item() const {
  if (numel() != 1) throw InvalidArgument("item() requires a one-element tensor");
  return impl_->value[0];
}

void Tensor::backward() {
  if (numel() != 1)
    throw InvalidArgument("backward() root must be a scalar tensor, got " +
                          std::to_string(numel()) + " elements");
  // Topological order by iterative post-order DFS.
  std::vector<detail::TensorImpl*> order;
  std::unordered_set<detail::TensorImpl*> visited;
  struct Frame {
    detail::TensorImpl* node;
    size_t next_parent;
  };
  std::vector<Frame> stack;
  if (visited.insert(impl_.get()).second) stack.push_back({impl_.get(), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      detail::TensorImpl* p = f.node->parents[f.next_parent++].get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  impl_->ensure_grad();
  impl_->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorImpl* node = *it;
    if (node->backprop && !node->grad.empty()) node->backprop(*node);
  }
}

namespace detail {

TensorImpl::~TensorImpl() {
  if (parents.empty() && !backprop) return;
  // Steal every reachable sole-owner node's parent list before letting any
  // shared_ptr die, so no destructor ever sees a non-empty chain below it.
  // Backprop closures capture their input tensors; null them only after the
  // inputs are parked in `pending`, which keeps those impls alive through
  // the closure teardown.
  std::vector<std::shared_ptr<TensorImpl>> pending;
  for (auto& p : parents) pending.push_back(std::move(p));
  parents.clear();
  backprop = nullptr;
  while (!pending.empty()) {
    std::shared_ptr<TensorImpl> cur = std::move(pending.back());
    pending.pop_back();
    if (!cur || cur.use_count() != 1) continue;
    for (auto& p : cur->parents) pending.push_back(std::move(p));
    cur->parents.clear();
    cur->backprop = nullptr;
  }
}

Tensor make_result(std::vector<int64_t> shape, std::vector<double> value,
                   std::vector<Tensor> parents,
                   std::function<void(TensorImpl&)> backprop) {
  Tensor out = Tensor::from_data(std::move(shape), std::move(value));
  bool needs_grad = false;
  if (grad_enabled()) {
    for (const auto& p : parents)
      if (p.defined() && p.requires_grad()) needs_grad = true;
  }
  if (needs_grad) {
    auto impl = out.impl();
    impl->requires_grad = true;
    impl->backprop = std::move(backprop);
    impl->parents.reserve(parents.size());
    for (auto& p : parents)
      if (p.defined()) impl->parents.push_back(p.impl());
  }
  return out;
}

}  // namespace detail

}  // namespace tnet
