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

#include "tnet/ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "tnet/error.hpp"

namespace tnet {

namespace {

using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<MatrixRM>;
using ConstMap = Eigen::Map<const MatrixRM>;

void check_rank2(const Tensor& x, const char* what) {
  if (!x.defined() || x.rank() != 2)
    throw InvalidArgument(std::string(what) + " must be a rank-2 [C x T] tensor");
}

// Gathers the padded input window around each output position into a
// [C_in_per_group*k x T] matrix so the convolution becomes one GEMM.
void im2col(const double* x, int64_t channels, int64_t T, int kernel,
            std::vector<double>& col) {
  const int64_t pad = (kernel - 1) / 2;
  col.assign(static_cast<size_t>(channels) * kernel * T, 0.0);
  for (int64_t c = 0; c < channels; ++c) {
    for (int j = 0; j < kernel; ++j) {
      double* dst = col.data() + (c * kernel + j) * T;
      const int64_t shift = j - pad;  // source index = t + shift
      const int64_t t0 = std::max<int64_t>(0, -shift);
      const int64_t t1 = std::min<int64_t>(T, T - shift);
      const double* src = x + c * T + shift;
      for (int64_t t = t0; t < t1; ++t) dst[t] = src[t];
    }
  }
}

// Scatter-add transpose of im2col.
void col2im_add(const std::vector<double>& col, int64_t channels, int64_t T,
                int kernel, double* dx) {
  const int64_t pad = (kernel - 1) / 2;
  for (int64_t c = 0; c < channels; ++c) {
    for (int j = 0; j < kernel; ++j) {
      const double* src = col.data() + (c * kernel + j) * T;
      const int64_t shift = j - pad;
      const int64_t t0 = std::max<int64_t>(0, -shift);
      const int64_t t1 = std::min<int64_t>(T, T - shift);
      double* dst = dx + c * T + shift;
      for (int64_t t = t0; t < t1; ++t) dst[t] += src[t];
    }
  }
}

}  // namespace

void BatchNormState::init(int64_t channels) {
  running_mean.assign(static_cast<size_t>(channels), 0.0);
  running_var.assign(static_cast<size_t>(channels), 1.0);
  reset_calibration();
}

void BatchNormState::reset_calibration() {
  calib_frames = 0.0;
  calib_sum.assign(running_mean.size(), 0.0);
  calib_sumsq.assign(running_mean.size(), 0.0);
}

void BatchNormState::finalize_calibration() {
  if (calib_frames <= 0.0) return;
  for (size_t c = 0; c < running_mean.size(); ++c) {
    const double mean = calib_sum[c] / calib_frames;
    double var = calib_sumsq[c] / calib_frames - mean * mean;
    if (var < 0.0) var = 0.0;
    running_mean[c] = quantize(mean);
    running_var[c] = quantize(var);
  }
  reset_calibration();
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int kernel, int groups) {
  check_rank2(x, "conv1d input");
  if (!weight.defined() || weight.rank() != 3)
    throw InvalidArgument("conv1d weight must be rank-3 [C_out x C_in/groups x k]");
  if (kernel < 1 || kernel % 2 == 0)
    throw InvalidArgument("conv1d kernel must be odd, got " + std::to_string(kernel));
  const int64_t c_in = x.dim(0);
  const int64_t T = x.dim(1);
  if (groups < 1 || c_in % groups != 0)
    throw InvalidArgument("conv1d C_in=" + std::to_string(c_in) +
                          " not divisible by groups=" + std::to_string(groups));
  const int64_t c_out = weight.dim(0);
  const int64_t c_in_g = c_in / groups;
  if (weight.dim(1) != c_in_g)
    throw InvalidArgument("conv1d weight dim 1 is " + std::to_string(weight.dim(1)) +
                          ", expected C_in/groups = " + std::to_string(c_in_g));
  if (weight.dim(2) != kernel)
    throw InvalidArgument("conv1d weight dim 2 is " + std::to_string(weight.dim(2)) +
                          ", expected kernel = " + std::to_string(kernel));
  if (c_out % groups != 0)
    throw InvalidArgument("conv1d C_out=" + std::to_string(c_out) +
                          " not divisible by groups=" + std::to_string(groups));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != c_out))
    throw InvalidArgument("conv1d bias dim 0 must equal C_out = " +
                          std::to_string(c_out));

  const int64_t c_out_g = c_out / groups;
  const bool depthwise = (groups == c_in && c_in_g == 1);
  const bool pointwise = (kernel == 1 && groups == 1);

  std::vector<double> y(static_cast<size_t>(c_out) * T, 0.0);
  const double* xv = x.values().data();
  const double* wv = weight.values().data();

  if (pointwise) {
    Map(y.data(), c_out, T).noalias() =
        ConstMap(wv, c_out, c_in) * ConstMap(xv, c_in, T);
  } else if (depthwise) {
    const int64_t pad = (kernel - 1) / 2;
    for (int64_t c = 0; c < c_out; ++c) {
      const double* w = wv + c * kernel;
      const double* xr = xv + c * T;
      double* yr = y.data() + c * T;
      for (int j = 0; j < kernel; ++j) {
        const double wj = w[j];
        const int64_t shift = j - pad;
        const int64_t t0 = std::max<int64_t>(0, -shift);
        const int64_t t1 = std::min<int64_t>(T, T - shift);
        for (int64_t t = t0; t < t1; ++t) yr[t] += wj * xr[t + shift];
      }
    }
  } else {
    std::vector<double> col;
    for (int g = 0; g < groups; ++g) {
      im2col(xv + g * c_in_g * T, c_in_g, T, kernel, col);
      Map(y.data() + g * c_out_g * T, c_out_g, T).noalias() =
          ConstMap(wv + g * c_out_g * c_in_g * kernel, c_out_g, c_in_g * kernel) *
          ConstMap(col.data(), c_in_g * kernel, T);
    }
  }
  if (bias.defined()) {
    const double* bv = bias.values().data();
    for (int64_t c = 0; c < c_out; ++c) {
      double* yr = y.data() + c * T;
      for (int64_t t = 0; t < T; ++t) yr[t] += bv[c];
    }
  }

  Tensor xt = x, wt = weight, bt = bias;
  const int k = kernel;
  const int G = groups;
  auto backprop = [xt, wt, bt, k, G, c_in, c_out, c_in_g, c_out_g, T, depthwise,
                   pointwise](detail::TensorImpl& self) mutable {
    const double* dy = self.grad.data();
    const double* xv = xt.values().data();
    const double* wv = wt.values().data();
    if (xt.requires_grad()) {
      double* dx = xt.grad().data();
      if (pointwise) {
        Map(dx, c_in, T).noalias() +=
            ConstMap(wv, c_out, c_in).transpose() * ConstMap(dy, c_out, T);
      } else if (depthwise) {
        const int64_t pad = (k - 1) / 2;
        for (int64_t c = 0; c < c_out; ++c) {
          const double* w = wv + c * k;
          const double* dyr = dy + c * T;
          double* dxr = dx + c * T;
          for (int j = 0; j < k; ++j) {
            const double wj = w[j];
            const int64_t shift = j - pad;
            const int64_t t0 = std::max<int64_t>(0, -shift);
            const int64_t t1 = std::min<int64_t>(T, T - shift);
            for (int64_t t = t0; t < t1; ++t) dxr[t + shift] += wj * dyr[t];
          }
        }
      } else {
        std::vector<double> dcol(static_cast<size_t>(c_in_g) * k * T);
        for (int g = 0; g < G; ++g) {
          Map(dcol.data(), c_in_g * k, T).noalias() =
              ConstMap(wv + g * c_out_g * c_in_g * k, c_out_g, c_in_g * k)
                  .transpose() *
              ConstMap(dy + g * c_out_g * T, c_out_g, T);
          col2im_add(dcol, c_in_g, T, k, dx + g * c_in_g * T);
        }
      }
    }
    if (wt.requires_grad()) {
      double* dw = wt.grad().data();
      if (pointwise) {
        Map(dw, c_out, c_in).noalias() +=
            ConstMap(dy, c_out, T) * ConstMap(xv, c_in, T).transpose();
      } else if (depthwise) {
        const int64_t pad = (k - 1) / 2;
        for (int64_t c = 0; c < c_out; ++c) {
          const double* xr = xv + c * T;
          const double* dyr = dy + c * T;
          double* dwr = dw + c * k;
          for (int j = 0; j < k; ++j) {
            const int64_t shift = j - pad;
            const int64_t t0 = std::max<int64_t>(0, -shift);
            const int64_t t1 = std::min<int64_t>(T, T - shift);
            double acc = 0.0;
            for (int64_t t = t0; t < t1; ++t) acc += dyr[t] * xr[t + shift];
            dwr[j] += acc;
          }
        }
      } else {
        std::vector<double> col;
        for (int g = 0; g < G; ++g) {
          im2col(xv + g * c_in_g * T, c_in_g, T, k, col);
          Map(dw + g * c_out_g * c_in_g * k, c_out_g, c_in_g * k).noalias() +=
              ConstMap(dy + g * c_out_g * T, c_out_g, T) *
              ConstMap(col.data(), c_in_g * k, T).transpose();
        }
      }
    }
    if (bt.defined() && bt.requires_grad()) {
      double* db = bt.grad().data();
      for (int64_t c = 0; c < c_out; ++c) {
        double acc = 0.0;
        const double* dyr = dy + c * T;
        for (int64_t t = 0; t < T; ++t) acc += dyr[t];
        db[c] += acc;
      }
    }
  };

  return detail::make_result({c_out, T}, std::move(y), {x, weight, bias},
                             std::move(backprop));
}

Tensor batch_norm1d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    BatchNormState& state, Mode mode) {
  check_rank2(x, "batch_norm1d input");
  const int64_t C = x.dim(0);
  const int64_t T = x.dim(1);
  if (gamma.dim(0) != C || beta.dim(0) != C)
    throw InvalidArgument("batch_norm1d gamma/beta dim 0 must equal C = " +
                          std::to_string(C));
  if (state.running_mean.empty()) state.init(C);
  const bool batch_stats = (mode == Mode::Train || mode == Mode::Calibrate);
  if (batch_stats && T < 2)
    throw InvalidArgument("batch_norm1d needs T >= 2 in train mode, got T = " +
                          std::to_string(T));

  const double* xv = x.values().data();
  const double* gv = gamma.values().data();
  const double* bv = beta.values().data();
  std::vector<double> mean(C), var(C);
  if (batch_stats) {
    for (int64_t c = 0; c < C; ++c) {
      const double* xr = xv + c * T;
      double m = 0.0;
      for (int64_t t = 0; t < T; ++t) m += xr[t];
      m /= static_cast<double>(T);
      double v = 0.0;
      for (int64_t t = 0; t < T; ++t) {
        const double d = xr[t] - m;
        v += d * d;
      }
      v /= static_cast<double>(T);
      mean[c] = m;
      var[c] = v;
    }
    if (mode == Mode::Train) {
      const double mom = state.momentum;
      const double unbias = static_cast<double>(T) / static_cast<double>(T - 1);
      for (int64_t c = 0; c < C; ++c) {
        state.running_mean[c] =
            quantize((1.0 - mom) * state.running_mean[c] + mom * mean[c]);
        state.running_var[c] =
            quantize((1.0 - mom) * state.running_var[c] + mom * var[c] * unbias);
      }
    } else {
      state.calib_frames += static_cast<double>(T);
      for (int64_t c = 0; c < C; ++c) {
        state.calib_sum[c] += mean[c] * T;
        state.calib_sumsq[c] += (var[c] + mean[c] * mean[c]) * T;
      }
    }
  } else {
    mean = state.running_mean;
    var = state.running_var;
  }

  std::vector<double> inv_std(C), xhat(static_cast<size_t>(C) * T);
  std::vector<double> y(static_cast<size_t>(C) * T);
  for (int64_t c = 0; c < C; ++c) {
    inv_std[c] = 1.0 / std::sqrt(var[c] + state.eps);
    const double* xr = xv + c * T;
    double* hr = xhat.data() + c * T;
    double* yr = y.data() + c * T;
    for (int64_t t = 0; t < T; ++t) {
      hr[t] = (xr[t] - mean[c]) * inv_std[c];
      yr[t] = gv[c] * hr[t] + bv[c];
    }
  }

  Tensor xt = x, gt = gamma, btt = beta;
  auto backprop = [xt, gt, btt, xhat = std::move(xhat),
                   inv_std = std::move(inv_std), C, T,
                   batch_stats](detail::TensorImpl& self) mutable {
    const double* dy = self.grad.data();
    const double* gv = gt.values().data();
    std::vector<double> sum_dy(C, 0.0), sum_dy_xhat(C, 0.0);
    for (int64_t c = 0; c < C; ++c) {
      const double* dyr = dy + c * T;
      const double* hr = xhat.data() + c * T;
      double s = 0.0, sh = 0.0;
      for (int64_t t = 0; t < T; ++t) {
        s += dyr[t];
        sh += dyr[t] * hr[t];
      }
      sum_dy[c] = s;
      sum_dy_xhat[c] = sh;
    }
    if (gt.requires_grad()) {
      double* dg = gt.grad().data();
      for (int64_t c = 0; c < C; ++c) dg[c] += sum_dy_xhat[c];
    }
    if (btt.requires_grad()) {
      double* db = btt.grad().data();
      for (int64_t c = 0; c < C; ++c) db[c] += sum_dy[c];
    }
    if (xt.requires_grad()) {
      double* dx = xt.grad().data();
      const double n = static_cast<double>(T);
      for (int64_t c = 0; c < C; ++c) {
        const double* dyr = dy + c * T;
        const double* hr = xhat.data() + c * T;
        double* dxr = dx + c * T;
        const double g_is = gv[c] * inv_std[c];
        if (batch_stats) {
          const double m_dy = sum_dy[c] / n;
          const double m_dyh = sum_dy_xhat[c] / n;
          for (int64_t t = 0; t < T; ++t)
            dxr[t] += g_is * (dyr[t] - m_dy - hr[t] * m_dyh);
        } else {
          for (int64_t t = 0; t < T; ++t) dxr[t] += g_is * dyr[t];
        }
      }
    }
  };

  return detail::make_result({C, T}, std::move(y), {x, gamma, beta},
                             std::move(backprop));
}

Tensor relu(const Tensor& x) {
  std::vector<double> y(x.values().begin(), x.values().end());
  for (auto& v : y)
    if (v < 0.0) v = 0.0;
  Tensor xt = x;
  auto backprop = [xt](detail::TensorImpl& self) mutable {
    if (!xt.requires_grad()) return;
    const double* dy = self.grad.data();
    const auto xv = xt.values();
    double* dx = xt.grad().data();
    for (int64_t i = 0; i < xt.numel(); ++i)
      if (xv[i] > 0.0) dx[i] += dy[i];
  };
  return detail::make_result(x.shape(), std::move(y), {x}, std::move(backprop));
}

Tensor dropout(const Tensor& x, double p, Rng& rng, Mode mode) {
  if (p < 0.0 || p >= 1.0)
    throw InvalidArgument("dropout probability must be in [0, 1), got " +
                          std::to_string(p));
  if (mode != Mode::Train || p == 0.0) return x;
  const double scale = 1.0 / (1.0 - p);
  const int64_t n = x.numel();
  std::vector<uint8_t> keep(static_cast<size_t>(n));
  std::vector<double> y(static_cast<size_t>(n));
  const auto xv = x.values();
  for (int64_t i = 0; i < n; ++i) {
    keep[i] = rng.uniform() >= p;
    y[i] = keep[i] ? xv[i] * scale : 0.0;
  }
  Tensor xt = x;
  auto backprop = [xt, keep = std::move(keep), scale](detail::TensorImpl& self) mutable {
    if (!xt.requires_grad()) return;
    const double* dy = self.grad.data();
    double* dx = xt.grad().data();
    for (int64_t i = 0; i < xt.numel(); ++i)
      if (keep[i]) dx[i] += dy[i] * scale;
  };
  return detail::make_result(x.shape(), std::move(y), {x}, std::move(backprop));
}

Tensor embedding(const std::vector<int>& ids, const Tensor& table) {
  if (!table.defined() || table.rank() != 2)
    throw InvalidArgument("embedding table must be rank-2 [V x D]");
  const int64_t V = table.dim(0);
  const int64_t D = table.dim(1);
  const int64_t T = static_cast<int64_t>(ids.size());
  for (int64_t t = 0; t < T; ++t)
    if (ids[t] < 0 || ids[t] >= V)
      throw InvalidArgument("embedding id " + std::to_string(ids[t]) +
                            " at position " + std::to_string(t) +
                            " is outside the vocabulary of size " + std::to_string(V));
  std::vector<double> y(static_cast<size_t>(D) * T);
  const double* tv = table.values().data();
  for (int64_t t = 0; t < T; ++t) {
    const double* row = tv + static_cast<int64_t>(ids[t]) * D;
    for (int64_t d = 0; d < D; ++d) y[d * T + t] = row[d];
  }
  Tensor tt = table;
  auto backprop = [tt, ids, D, T](detail::TensorImpl& self) mutable {
    if (!tt.requires_grad()) return;
    const double* dy = self.grad.data();
    double* dt = tt.grad().data();
    for (int64_t t = 0; t < T; ++t) {
      double* row = dt + static_cast<int64_t>(ids[t]) * D;
      for (int64_t d = 0; d < D; ++d) row[d] += dy[d * T + t];
    }
  };
  return detail::make_result({D, T}, std::move(y), {table}, std::move(backprop));
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw InvalidArgument("add: operand shapes differ");
  std::vector<double> y(static_cast<size_t>(a.numel()));
  const auto av = a.values();
  const auto bv = b.values();
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = av[i] + bv[i];
  Tensor at = a, bt = b;
  auto backprop = [at, bt](detail::TensorImpl& self) mutable {
    const double* dy = self.grad.data();
    if (at.requires_grad()) {
      double* da = at.grad().data();
      for (int64_t i = 0; i < at.numel(); ++i) da[i] += dy[i];
    }
    if (bt.requires_grad()) {
      double* db = bt.grad().data();
      for (int64_t i = 0; i < bt.numel(); ++i) db[i] += dy[i];
    }
  };
  return detail::make_result(a.shape(), std::move(y), {a, b}, std::move(backprop));
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> y(static_cast<size_t>(a.numel()));
  const auto av = a.values();
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = av[i] * c;
  Tensor at = a;
  auto backprop = [at, c](detail::TensorImpl& self) mutable {
    if (!at.requires_grad()) return;
    const double* dy = self.grad.data();
    double* da = at.grad().data();
    for (int64_t i = 0; i < at.numel(); ++i) da[i] += dy[i] * c;
  };
  return detail::make_result(a.shape(), std::move(y), {a}, std::move(backprop));
}

namespace {

// Resolves the (channels, positions) view of a loss input and validates the
// position mask. Returns the number of valid positions.
int64_t resolve_mask(const Tensor& x, const std::vector<uint8_t>& mask,
                     int64_t& C, int64_t& T) {
  if (x.rank() == 1) {
    C = 1;
    T = x.dim(0);
  } else if (x.rank() == 2) {
    C = x.dim(0);
    T = x.dim(1);
  } else {
    throw InvalidArgument("loss input must be rank 1 or 2");
  }
  if (!mask.empty() && static_cast<int64_t>(mask.size()) != T)
    throw InvalidArgument("mask length " + std::to_string(mask.size()) +
                          " does not match position count " + std::to_string(T));
  int64_t valid = 0;
  if (mask.empty()) {
    valid = T;
  } else {
    for (uint8_t m : mask) valid += (m != 0);
  }
  if (valid == 0) throw InvalidArgument("degenerate batch: all positions masked");
  return valid;
}

}  // namespace

Tensor mse_loss(const Tensor& pred, const Tensor& target,
                const std::vector<uint8_t>& mask) {
  if (pred.shape() != target.shape())
    throw InvalidArgument("mse_loss: pred and target shapes differ");
  int64_t C = 0, T = 0;
  const int64_t valid = resolve_mask(pred, mask, C, T);
  const double inv_n = 1.0 / static_cast<double>(valid * C);
  const auto pv = pred.values();
  const auto tv = target.values();
  double acc = 0.0;
  for (int64_t c = 0; c < C; ++c)
    for (int64_t t = 0; t < T; ++t) {
      if (!mask.empty() && !mask[t]) continue;
      const double d = pv[c * T + t] - tv[c * T + t];
      acc += d * d;
    }
  Tensor pt = pred, tt = target;
  auto backprop = [pt, tt, mask, C, T, inv_n](detail::TensorImpl& self) mutable {
    const double d_out = self.grad[0];
    const auto pv = pt.values();
    const auto tv = tt.values();
    auto scatter = [&](double* dst, double sign) {
      for (int64_t c = 0; c < C; ++c)
        for (int64_t t = 0; t < T; ++t) {
          if (!mask.empty() && !mask[t]) continue;
          dst[c * T + t] +=
              sign * 2.0 * (pv[c * T + t] - tv[c * T + t]) * inv_n * d_out;
        }
    };
    if (pt.requires_grad()) scatter(pt.grad().data(), 1.0);
    if (tt.requires_grad()) scatter(tt.grad().data(), -1.0);
  };
  return detail::make_result({1}, {acc * inv_n}, {pred, target},
                             std::move(backprop));
}

Tensor xe_loss(const Tensor& logits, const std::vector<int>& targets,
               const std::vector<uint8_t>& mask) {
  check_rank2(logits, "xe_loss logits");
  const int64_t K = logits.dim(0);
  const int64_t T = logits.dim(1);
  if (static_cast<int64_t>(targets.size()) != T)
    throw InvalidArgument("xe_loss: targets length " + std::to_string(targets.size()) +
                          " does not match T = " + std::to_string(T));
  int64_t C = 0, Tm = 0;
  const int64_t valid = resolve_mask(logits, mask, C, Tm);
  for (int64_t t = 0; t < T; ++t) {
    if (!mask.empty() && !mask[t]) continue;
    if (targets[t] < 0 || targets[t] >= K)
      throw InvalidArgument("xe_loss: target class " + std::to_string(targets[t]) +
                            " at position " + std::to_string(t) +
                            " is outside [0, " + std::to_string(K) + ")");
  }
  const double inv_n = 1.0 / static_cast<double>(valid);
  const auto lv = logits.values();
  std::vector<double> softmax(static_cast<size_t>(K) * T, 0.0);
  double acc = 0.0;
  for (int64_t t = 0; t < T; ++t) {
    if (!mask.empty() && !mask[t]) continue;
    double mx = lv[t];
    for (int64_t k = 1; k < K; ++k) mx = std::max(mx, lv[k * T + t]);
    double z = 0.0;
    for (int64_t k = 0; k < K; ++k) z += std::exp(lv[k * T + t] - mx);
    const double log_z = std::log(z) + mx;
    for (int64_t k = 0; k < K; ++k)
      softmax[k * T + t] = std::exp(lv[k * T + t] - log_z);
    acc -= lv[targets[t] * T + t] - log_z;
  }
  Tensor lt = logits;
  auto backprop = [lt, targets, mask, softmax = std::move(softmax), K, T,
                   inv_n](detail::TensorImpl& self) mutable {
    if (!lt.requires_grad()) return;
    const double d_out = self.grad[0];
    double* dl = lt.grad().data();
    for (int64_t t = 0; t < T; ++t) {
      if (!mask.empty() && !mask[t]) continue;
      for (int64_t k = 0; k < K; ++k) {
        double g = softmax[k * T + t];
        if (k == targets[t]) g -= 1.0;
        dl[k * T + t] += g * inv_n * d_out;
      }
    }
  };
  return detail::make_result({1}, {acc * inv_n}, {logits}, std::move(backprop));
}

}  // namespace tnet
