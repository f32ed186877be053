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
#include <numeric>

#include "tnet/grad_check.hpp"
#include "tnet/ops.hpp"

using namespace tnet;

namespace {

Tensor randn(std::vector<int64_t> shape, Rng& rng, bool requires_grad) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return Tensor::from_data(std::move(shape), std::move(v), requires_grad);
}

}  // namespace

TEST_CASE("conv1d matches a hand-worked same-padding correlation") {
  // x = [1,2,3], w = [1,1,1, no bias] -> sliding sums with zero padding.
  Tensor x = Tensor::from_data({1, 3}, {1, 2, 3});
  Tensor w = Tensor::from_data({1, 1, 3}, {1, 1, 1});
  Tensor y = conv1d(x, w, Tensor(), 3, 1);
  REQUIRE(y.numel() == 3);
  CHECK(y.value_at(0) == doctest::Approx(3));   // 0+1+2
  CHECK(y.value_at(1) == doctest::Approx(6));   // 1+2+3
  CHECK(y.value_at(2) == doctest::Approx(5));   // 2+3+0
}

TEST_CASE("conv1d bias adds per output channel") {
  Tensor x = Tensor::from_data({1, 2}, {1, 1});
  Tensor w = Tensor::from_data({2, 1, 1}, {2, -1});
  Tensor b = Tensor::from_data({2}, {10, 20});
  Tensor y = conv1d(x, w, b, 1, 1);
  CHECK(y.value_at(0) == doctest::Approx(12));
  CHECK(y.value_at(1) == doctest::Approx(12));
  CHECK(y.value_at(2) == doctest::Approx(19));
  CHECK(y.value_at(3) == doctest::Approx(19));
}

TEST_CASE("depthwise conv1d keeps channels independent") {
  // Two channels, each with its own k=1 filter.
  Tensor x = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  Tensor w = Tensor::from_data({2, 1, 1}, {10, 100});
  Tensor y = conv1d(x, w, Tensor(), 1, 2);
  CHECK(y.value_at(0) == doctest::Approx(10));
  CHECK(y.value_at(1) == doctest::Approx(20));
  CHECK(y.value_at(2) == doctest::Approx(300));
  CHECK(y.value_at(3) == doctest::Approx(400));
}

TEST_CASE("conv1d rejects bad shapes") {
  Tensor x = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor w = Tensor::from_data({1, 1, 3}, {1, 1, 1});
  CHECK_THROWS(conv1d(x, w, Tensor(), 3, 1));  // C_in mismatch
  Tensor w2 = Tensor::from_data({1, 2, 2}, {1, 1, 1, 1});
  CHECK_THROWS(conv1d(x, w2, Tensor(), 2, 1));  // even kernel
}

TEST_CASE("batch_norm1d train mode normalizes per channel") {
  Tensor x = Tensor::from_data({1, 2}, {0.0, 2.0});
  Tensor g = Tensor::full({1}, 1.0);
  Tensor b = Tensor::zeros({1});
  BatchNormState st;
  Tensor y = batch_norm1d(x, g, b, st, Mode::Train);
  // mean 1, biased var 1 -> y ~= [-1, 1] up to eps
  CHECK(y.value_at(0) == doctest::Approx(-0.999995).epsilon(1e-4));
  CHECK(y.value_at(1) == doctest::Approx(0.999995).epsilon(1e-4));
  // Running stats move from (0,1) toward batch stats; var update is
  // unbiased (T/(T-1) * biased = 2).
  CHECK(st.running_mean[0] == doctest::Approx(0.1));
  CHECK(st.running_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 2.0));
}

TEST_CASE("batch_norm1d eval mode uses running statistics") {
  Tensor x = Tensor::from_data({1, 2}, {5.0, 7.0});
  Tensor g = Tensor::full({1}, 2.0);
  Tensor b = Tensor::full({1}, 1.0);
  BatchNormState st;
  st.init(1);
  st.running_mean[0] = 5.0;
  st.running_var[0] = 4.0;
  Tensor y = batch_norm1d(x, g, b, st, Mode::Eval);
  CHECK(y.value_at(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(y.value_at(1) == doctest::Approx(3.0).epsilon(1e-4));
  // Eval never touches the running stats.
  CHECK(st.running_mean[0] == 5.0);
}

TEST_CASE("calibration aggregates exact dataset statistics") {
  set_precision(Precision::F64);
  Tensor g = Tensor::full({1}, 1.0);
  Tensor b = Tensor::zeros({1});
  BatchNormState st;
  st.init(1);
  st.reset_calibration();
  // Two "utterances" of different lengths; pooled stats cover all 5 frames.
  Tensor x1 = Tensor::from_data({1, 2}, {1.0, 2.0});
  Tensor x2 = Tensor::from_data({1, 3}, {3.0, 4.0, 5.0});
  batch_norm1d(x1, g, b, st, Mode::Calibrate);
  batch_norm1d(x2, g, b, st, Mode::Calibrate);
  st.finalize_calibration();
  const double mean = (1 + 2 + 3 + 4 + 5) / 5.0;
  double var = 0.0;
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) var += (v - mean) * (v - mean);
  var /= 5.0;
  CHECK(st.running_mean[0] == doctest::Approx(mean));
  CHECK(st.running_var[0] == doctest::Approx(var));
  set_precision(Precision::F32);
}

TEST_CASE("relu clamps below zero") {
  Tensor x = Tensor::from_data({4}, {-2, -0.5, 0, 3});
  Tensor y = relu(x);
  CHECK(y.value_at(0) == 0);
  CHECK(y.value_at(1) == 0);
  CHECK(y.value_at(2) == 0);
  CHECK(y.value_at(3) == 3);
}

TEST_CASE("dropout train mode scales survivors and spares eval mode") {
  Rng rng(11);
  Tensor x = Tensor::full({1000}, 1.0);
  Tensor y = dropout(x, 0.25, rng, Mode::Train);
  int64_t kept = 0;
  for (double v : y.values()) {
    CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.75)));
    if (v != 0.0) ++kept;
  }
  CHECK(kept > 600);
  CHECK(kept < 900);

  Rng rng2(11);
  Tensor z = dropout(x, 0.25, rng2, Mode::Eval);
  for (double v : z.values()) CHECK(v == 1.0);

  // p = 0 is the identity and must not consume randomness.
  Rng rng3(11);
  const uint64_t before = rng3.next_u64();
  Rng rng4(11);
  dropout(x, 0.0, rng4, Mode::Train);
  CHECK(rng4.next_u64() == before);
}

TEST_CASE("embedding gathers one column per id") {
  Tensor table = Tensor::from_data({3, 2}, {1, 2, 3, 4, 5, 6});
  Tensor y = embedding({2, 0, 2}, table);
  REQUIRE(y.dim(0) == 2);
  REQUIRE(y.dim(1) == 3);
  // Column t holds table row ids[t]; layout is [D x T].
  CHECK(y.value_at(0) == 5);  // d=0,t=0
  CHECK(y.value_at(1) == 1);  // d=0,t=1
  CHECK(y.value_at(2) == 5);  // d=0,t=2
  CHECK(y.value_at(3) == 6);  // d=1,t=0
  CHECK(y.value_at(5) == 6);  // d=1,t=2
}

TEST_CASE("mse_loss on a known pair") {
  Tensor p = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  Tensor t = Tensor::from_data({2, 2}, {0, 0, 0, 0});
  CHECK(mse_loss(p, t).item() == doctest::Approx((1 + 4 + 9 + 16) / 4.0));
}

TEST_CASE("mse_loss masked columns contribute exactly zero") {
  set_precision(Precision::F64);
  Tensor p = Tensor::from_data({2, 2}, {1, 100, 3, 100});
  Tensor t = Tensor::zeros({2, 2});
  Tensor l = mse_loss(p, t, {1, 0});
  CHECK(l.item() == doctest::Approx((1 + 9) / 2.0));
  set_precision(Precision::F32);
}

TEST_CASE("xe_loss of uniform logits is log K") {
  Tensor logits = Tensor::zeros({32, 3});
  Tensor l = xe_loss(logits, {0, 5, 31});
  CHECK(l.item() == doctest::Approx(std::log(32.0)).epsilon(1e-6));
}

TEST_CASE("xe_loss picks out the target log-probability") {
  set_precision(Precision::F64);
  Tensor logits = Tensor::from_data({2, 1}, {2.0, 0.0});
  Tensor l = xe_loss(logits, {0});
  const double z = std::exp(2.0) + 1.0;
  CHECK(l.item() == doctest::Approx(-(2.0 - std::log(z))));
  set_precision(Precision::F32);
}

TEST_CASE("gradients agree with central differences") {
  set_precision(Precision::F64);
  Rng rng(5);

  SUBCASE("conv1d dense") {
    Tensor x = randn({3, 7}, rng, true);
    Tensor w = randn({4, 3, 5}, rng, true);
    Tensor b = randn({4}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return mse_loss(conv1d(in[0], in[1], in[2], 5, 1),
                      Tensor::zeros({4, 7}));
    };
    CHECK(grad_check(fn, {x, w, b}) < 1e-4);
  }

  SUBCASE("conv1d depthwise") {
    Tensor x = randn({4, 6}, rng, true);
    Tensor w = randn({4, 1, 3}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return mse_loss(conv1d(in[0], in[1], Tensor(), 3, 4),
                      Tensor::zeros({4, 6}));
    };
    CHECK(grad_check(fn, {x, w}) < 1e-4);
  }

  SUBCASE("batch_norm1d train") {
    Tensor x = randn({3, 8}, rng, true);
    Tensor g = randn({3}, rng, true);
    Tensor b = randn({3}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      BatchNormState st;  // fresh state per call keeps fn deterministic
      return mse_loss(batch_norm1d(in[0], in[1], in[2], st, Mode::Train),
                      Tensor::zeros({3, 8}));
    };
    CHECK(grad_check(fn, {x, g, b}) < 1e-4);
  }

  SUBCASE("relu away from the kink") {
    Tensor x = Tensor::from_data({4}, {-1.2, -0.4, 0.3, 1.7}, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return mse_loss(relu(in[0]), Tensor::full({4}, 0.5));
    };
    CHECK(grad_check(fn, {x}) < 1e-4);
  }

  SUBCASE("dropout with a replayed mask") {
    Tensor x = randn({16}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      Rng fixed(99);  // same mask on every evaluation
      return mse_loss(dropout(in[0], 0.5, fixed, Mode::Train),
                      Tensor::zeros({16}));
    };
    CHECK(grad_check(fn, {x}) < 1e-4);
  }

  SUBCASE("embedding scatter") {
    Tensor table = randn({5, 3}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return mse_loss(embedding({0, 4, 4, 2}, in[0]),
                      Tensor::zeros({3, 4}));
    };
    CHECK(grad_check(fn, {table}) < 1e-4);
  }

  SUBCASE("add and scale") {
    Tensor a = randn({6}, rng, true);
    Tensor b = randn({6}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return mse_loss(scale(add(in[0], in[1]), -0.7), Tensor::zeros({6}));
    };
    CHECK(grad_check(fn, {a, b}) < 1e-4);
  }

  SUBCASE("xe_loss") {
    Tensor logits = randn({6, 4}, rng, true);
    auto fn = [](const std::vector<Tensor>& in) {
      return xe_loss(in[0], {1, 0, 5, 3});
    };
    CHECK(grad_check(fn, {logits}) < 1e-4);
  }

  SUBCASE("masked losses") {
    Tensor p = randn({2, 4}, rng, true);
    auto fn_mse = [](const std::vector<Tensor>& in) {
      return mse_loss(in[0], Tensor::full({2, 4}, 0.3), {1, 0, 1, 1});
    };
    CHECK(grad_check(fn_mse, {p}) < 1e-4);
    Tensor logits = randn({3, 4}, rng, true);
    auto fn_xe = [](const std::vector<Tensor>& in) {
      return xe_loss(in[0], {0, 1, 2, 0}, {1, 1, 0, 1});
    };
    CHECK(grad_check(fn_xe, {logits}) < 1e-4);
  }

  set_precision(Precision::F32);
}
