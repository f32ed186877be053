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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnet/ops.hpp"
#include "tnet/tensor.hpp"

using namespace tnet;

TEST_CASE("factories produce the requested shapes and fills") {
  Tensor z = Tensor::zeros({2, 3});
  CHECK(z.numel() == 6);
  CHECK(z.rank() == 2);
  for (double v : z.values()) CHECK(v == 0.0);

  Tensor f = Tensor::full({4}, 2.5);
  for (double v : f.values()) CHECK(v == 2.5);

  Tensor s = Tensor::scalar(-3.0);
  CHECK(s.item() == -3.0);
}

TEST_CASE("from_data rounds values through binary32 in F32 mode") {
  set_precision(Precision::F32);
  const double fine = 1.0 + 1e-12;  // not representable in binary32
  Tensor t = Tensor::from_data({1}, {fine});
  CHECK(t.value_at(0) == static_cast<double>(static_cast<float>(fine)));
  CHECK(t.value_at(0) != fine);

  set_precision(Precision::F64);
  Tensor u = Tensor::from_data({1}, {fine});
  CHECK(u.value_at(0) == fine);
  set_precision(Precision::F32);
}

TEST_CASE("quantize is the identity on binary32 values") {
  set_precision(Precision::F32);
  CHECK(quantize(0.5) == 0.5);
  CHECK(quantize(quantize(0.1)) == quantize(0.1));
  set_precision(Precision::F64);
  CHECK(quantize(1.0 + 1e-12) == 1.0 + 1e-12);
  set_precision(Precision::F32);
}

TEST_CASE("backward accumulates through a small graph") {
  set_precision(Precision::F64);
  Tensor a = Tensor::from_data({2}, {1.0, 2.0}, true);
  Tensor b = Tensor::from_data({2}, {3.0, 4.0}, true);
  // loss = sum over 2*(a+b) + a  (a reused: gradient should accumulate)
  Tensor c = add(a, b);
  Tensor d = scale(c, 2.0);
  Tensor e = add(d, a);
  Tensor loss = mse_loss(e, Tensor::zeros({2}));
  // e = 3a + 2b; loss = mean(e^2); dloss/da_i = 2*e_i*3/2 = 3*e_i
  loss.backward();
  const double e0 = 3 * 1.0 + 2 * 3.0;  // 9
  const double e1 = 3 * 2.0 + 2 * 4.0;  // 14
  CHECK(a.grad()[0] == doctest::Approx(3.0 * e0));
  CHECK(a.grad()[1] == doctest::Approx(3.0 * e1));
  CHECK(b.grad()[0] == doctest::Approx(2.0 * e0));
  CHECK(b.grad()[1] == doctest::Approx(2.0 * e1));
  set_precision(Precision::F32);
}

TEST_CASE("backward visits shared subgraphs once") {
  set_precision(Precision::F64);
  Tensor a = Tensor::scalar(3.0, true);
  Tensor b = add(a, a);       // 2a
  Tensor c = add(b, b);       // 4a
  c.backward();
  CHECK(a.grad()[0] == doctest::Approx(4.0));
  set_precision(Precision::F32);
}

TEST_CASE("zero_grad clears accumulated gradients") {
  Tensor a = Tensor::scalar(1.0, true);
  Tensor l = scale(a, 5.0);
  l.backward();
  CHECK(a.grad()[0] == doctest::Approx(5.0));
  a.zero_grad();
  CHECK(a.grad()[0] == 0.0);
}

TEST_CASE("NoGradGuard suppresses graph recording") {
  Tensor a = Tensor::scalar(1.0, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    Tensor l = scale(a, 5.0);
    CHECK_FALSE(l.requires_grad());
    CHECK(l.impl()->parents.empty());
  }
  CHECK(grad_enabled());
}

TEST_CASE("results without differentiable parents carry no tape") {
  Tensor a = Tensor::scalar(2.0, false);
  Tensor l = scale(a, 3.0);
  CHECK_FALSE(l.requires_grad());
  CHECK(l.impl()->parents.empty());
}

TEST_CASE("deep chains backpropagate without recursion limits") {
  set_precision(Precision::F64);
  Tensor a = Tensor::scalar(1.0, true);
  Tensor x = a;
  const int depth = 200000;
  for (int i = 0; i < depth; ++i) x = scale(x, 1.0);
  x.backward();
  CHECK(a.grad()[0] == doctest::Approx(1.0));
  set_precision(Precision::F32);
}

TEST_CASE("op outputs are binary32-representable in F32 mode") {
  set_precision(Precision::F32);
  Tensor a = Tensor::from_data({3}, {0.1, 0.2, 0.3});
  Tensor b = scale(a, 1.0 / 3.0);
  for (double v : b.values())
    CHECK(v == static_cast<double>(static_cast<float>(v)));
}
