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

#include "tnet/models.hpp"

#include <cmath>

#include "tnet/error.hpp"

namespace tnet {

namespace {

Tensor uniform_tensor(std::vector<int64_t> shape, double bound, Rng& rng) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> data(n);
  for (auto& v : data) v = (2.0 * rng.uniform() - 1.0) * bound;
  return Tensor::from_data(std::move(shape), std::move(data), true);
}

// He-uniform: bound sqrt(6 / fan_in), suited to the ReLU stack.
Tensor conv_weight(int64_t out_ch, int64_t in_per_group, int64_t kernel,
                   Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(in_per_group * kernel));
  return uniform_tensor({out_ch, in_per_group, kernel}, bound, rng);
}

SubBlock make_sub_block(int in_ch, int out_ch, int kernel, Rng& rng) {
  SubBlock sb;
  sb.depthwise.weight = conv_weight(in_ch, 1, kernel, rng);
  sb.depthwise.kernel = kernel;
  sb.depthwise.groups = in_ch;
  sb.pointwise.weight = conv_weight(out_ch, in_ch, 1, rng);
  sb.pointwise.kernel = 1;
  sb.pointwise.groups = 1;
  sb.norm.gamma = Tensor::full({out_ch}, 1.0, true);
  sb.norm.beta = Tensor::zeros({out_ch}, true);
  sb.norm.state.init(out_ch);
  return sb;
}

ConvBlock make_block(int in_ch, const BlockSpec& spec, Rng& rng) {
  if (spec.sub_blocks < 1)
    throw InvalidArgument("block needs at least one sub-block");
  ConvBlock b;
  b.spec = spec;
  int ch = in_ch;
  for (int s = 0; s < spec.sub_blocks; ++s) {
    b.subs.push_back(make_sub_block(ch, spec.channels, spec.kernel, rng));
    ch = spec.channels;
  }
  if (spec.residual) {
    b.proj.weight = conv_weight(spec.channels, in_ch, 1, rng);
    b.proj.kernel = 1;
    b.proj.groups = 1;
    b.proj_norm.gamma = Tensor::full({spec.channels}, 1.0, true);
    b.proj_norm.beta = Tensor::zeros({spec.channels}, true);
    b.proj_norm.state.init(spec.channels);
  }
  return b;
}

Tensor block_forward(ConvBlock& b, const Tensor& x, Mode mode, Rng& rng) {
  Tensor h = x;
  for (size_t s = 0; s < b.subs.size(); ++s) {
    SubBlock& sb = b.subs[s];
    h = conv1d(h, sb.depthwise.weight, Tensor(), sb.depthwise.kernel,
               sb.depthwise.groups);
    h = conv1d(h, sb.pointwise.weight, Tensor(), 1, 1);
    h = batch_norm1d(h, sb.norm.gamma, sb.norm.beta, sb.norm.state, mode);
    if (b.spec.residual && s + 1 == b.subs.size()) {
      Tensor r = conv1d(x, b.proj.weight, Tensor(), 1, 1);
      r = batch_norm1d(r, b.proj_norm.gamma, b.proj_norm.beta,
                       b.proj_norm.state, mode);
      h = add(h, r);
    }
    h = relu(h);
    h = dropout(h, b.spec.dropout, rng, mode);
  }
  return h;
}

Tensor stack_forward(std::vector<ConvBlock>& blocks, Conv1dLayer& head,
                     const Tensor& input, Mode mode, Rng& rng) {
  Tensor h = input;
  for (ConvBlock& b : blocks) h = block_forward(b, h, mode, rng);
  return conv1d(h, head.weight, head.bias, 1, 1);
}

void collect_params(std::vector<ConvBlock>& blocks, Conv1dLayer& head,
                    std::vector<NamedParam>& out) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string bp = "block" + std::to_string(i) + ".";
    ConvBlock& b = blocks[i];
    for (size_t s = 0; s < b.subs.size(); ++s) {
      const std::string sp = bp + "sub" + std::to_string(s) + ".";
      out.push_back({sp + "depthwise.weight", b.subs[s].depthwise.weight});
      out.push_back({sp + "pointwise.weight", b.subs[s].pointwise.weight});
      out.push_back({sp + "bn.gamma", b.subs[s].norm.gamma});
      out.push_back({sp + "bn.beta", b.subs[s].norm.beta});
    }
    if (b.spec.residual) {
      out.push_back({bp + "proj.weight", b.proj.weight});
      out.push_back({bp + "proj.bn.gamma", b.proj_norm.gamma});
      out.push_back({bp + "proj.bn.beta", b.proj_norm.beta});
    }
  }
  out.push_back({"head.weight", head.weight});
  out.push_back({"head.bias", head.bias});
}

void collect_buffers(std::vector<ConvBlock>& blocks,
                     std::vector<NamedBuffer>& out) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string bp = "block" + std::to_string(i) + ".";
    ConvBlock& b = blocks[i];
    for (size_t s = 0; s < b.subs.size(); ++s) {
      const std::string sp = bp + "sub" + std::to_string(s) + ".bn.";
      out.push_back({sp + "running_mean", &b.subs[s].norm.state.running_mean});
      out.push_back({sp + "running_var", &b.subs[s].norm.state.running_var});
    }
    if (b.spec.residual) {
      out.push_back(
          {bp + "proj.bn.running_mean", &b.proj_norm.state.running_mean});
      out.push_back(
          {bp + "proj.bn.running_var", &b.proj_norm.state.running_var});
    }
  }
}

int64_t count_params(std::vector<NamedParam> params) {
  int64_t n = 0;
  for (const auto& p : params)
    if (p.tensor.defined()) n += p.tensor.numel();
  return n;
}

}  // namespace

int duration_to_class(int64_t d) {
  if (d < 0) throw InvalidArgument("negative duration has no class");
  if (d < 16) return static_cast<int>(d);
  // Geometric buckets: edges at 16 * 32^(j/16), j = 0..16.
  const double j = 16.0 * std::log(static_cast<double>(d) / 16.0) /
                   std::log(32.0);
  const int bucket = std::min(15, std::max(0, static_cast<int>(j)));
  return 16 + bucket;
}

int64_t class_to_duration(int cls) {
  if (cls < 0 || cls >= kDurationClasses)
    throw InvalidArgument("duration class " + std::to_string(cls) +
                          " out of range");
  if (cls < 16) return cls;
  const double mid =
      16.0 * std::pow(32.0, (static_cast<double>(cls - 16) + 0.5) / 16.0);
  return static_cast<int64_t>(std::llround(mid));
}

std::vector<NamedParam> DurationPredictor::parameters() {
  std::vector<NamedParam> out;
  out.push_back({"embedding", embedding});
  collect_params(blocks, head, out);
  return out;
}

std::vector<NamedBuffer> DurationPredictor::buffers() {
  std::vector<NamedBuffer> out;
  collect_buffers(blocks, out);
  return out;
}

int64_t DurationPredictor::parameter_count() {
  return count_params(parameters());
}

std::vector<NamedParam> MelGenerator::parameters() {
  std::vector<NamedParam> out;
  out.push_back({"embedding", embedding});
  collect_params(blocks, head, out);
  return out;
}

std::vector<NamedBuffer> MelGenerator::buffers() {
  std::vector<NamedBuffer> out;
  collect_buffers(blocks, out);
  return out;
}

int64_t MelGenerator::parameter_count() { return count_params(parameters()); }

std::vector<BlockSpec> default_duration_blocks() {
  return {
      {3, 256, 3, 0.1, false},  // entry stack
      {5, 256, 5, 0.1, true},  {5, 256, 7, 0.1, true},
      {5, 256, 9, 0.1, true},  {5, 256, 11, 0.1, true},
      {5, 256, 13, 0.1, true},
      {1, 512, 1, 0.1, false},  // widen before the head
  };
}

std::vector<BlockSpec> default_mel_blocks() {
  return {
      {3, 256, 3, 0.1, false},
      {5, 256, 5, 0.1, true},   {5, 256, 7, 0.1, true},
      {5, 256, 9, 0.1, true},   {5, 256, 13, 0.1, true},
      {5, 256, 15, 0.1, true},  {5, 256, 17, 0.1, true},
      {5, 512, 21, 0.1, true},  {5, 512, 23, 0.1, true},
      {5, 512, 25, 0.1, true},
      {1, 1024, 1, 0.1, false},  // widen before the head
  };
}

DurationPredictor build_duration_predictor(
    DurationHead head, std::shared_ptr<const Vocabulary> vocab, Rng& rng,
    int embed_dim, std::vector<BlockSpec> blocks) {
  if (!vocab) throw InvalidArgument("null vocabulary");
  if (blocks.empty()) blocks = default_duration_blocks();
  DurationPredictor m;
  m.vocab = std::move(vocab);
  m.head_kind = head;
  m.embed_dim = embed_dim;
  std::vector<double> emb(static_cast<size_t>(m.vocab->size()) * embed_dim);
  for (auto& v : emb) v = 0.02 * rng.normal();
  m.embedding =
      Tensor::from_data({m.vocab->size(), embed_dim}, std::move(emb), true);
  int ch = embed_dim;
  for (const BlockSpec& spec : blocks) {
    m.blocks.push_back(make_block(ch, spec, rng));
    ch = spec.channels;
  }
  const int out_ch = head == DurationHead::XE ? kDurationClasses : 1;
  m.head.weight = conv_weight(out_ch, ch, 1, rng);
  m.head.bias = Tensor::zeros({out_ch}, true);
  m.head.kernel = 1;
  m.head.groups = 1;
  return m;
}

MelGenerator build_mel_generator(std::shared_ptr<const Vocabulary> vocab,
                                 Rng& rng, int embed_dim, int n_mels,
                                 std::vector<BlockSpec> blocks) {
  if (!vocab) throw InvalidArgument("null vocabulary");
  if (blocks.empty()) blocks = default_mel_blocks();
  MelGenerator m;
  m.vocab = std::move(vocab);
  m.embed_dim = embed_dim;
  m.n_mels = n_mels;
  std::vector<double> emb(static_cast<size_t>(m.vocab->size()) * embed_dim);
  for (auto& v : emb) v = 0.02 * rng.normal();
  m.embedding =
      Tensor::from_data({m.vocab->size(), embed_dim}, std::move(emb), true);
  int ch = embed_dim;
  for (const BlockSpec& spec : blocks) {
    m.blocks.push_back(make_block(ch, spec, rng));
    ch = spec.channels;
  }
  m.head.weight = conv_weight(n_mels, ch, 1, rng);
  m.head.bias = Tensor::zeros({n_mels}, true);
  m.head.kernel = 1;
  m.head.groups = 1;
  return m;
}

Tensor predict_durations(DurationPredictor& m, const TokenSequence& tokens,
                         Mode mode, Rng& rng) {
  if (!tokens.has_blanks)
    throw InvalidArgument("duration predictor expects a blank-interleaved "
                          "sequence");
  if (!tokens.vocab || !(*tokens.vocab == *m.vocab))
    throw InvalidArgument("token sequence vocabulary does not match the "
                          "model");
  const Tensor input = embedding(tokens.ids, m.embedding);
  return stack_forward(m.blocks, m.head, input, mode, rng);
}

std::vector<int64_t> decode_durations(const Tensor& head_out,
                                      DurationHead kind,
                                      const TokenSequence& tokens,
                                      double speed) {
  if (!tokens.has_blanks)
    throw InvalidArgument("decode_durations expects a blank-interleaved "
                          "sequence");
  if (speed <= 0.0) throw InvalidArgument("speed must be positive");
  const int64_t L = tokens.size();
  if (head_out.rank() != 2 || head_out.dim(1) != L)
    throw InvalidArgument("head output length does not match the token "
                          "sequence");
  const int64_t K = head_out.dim(0);
  std::span<const double> v = head_out.values();
  const int blank = tokens.vocab->blank_id();

  std::vector<int64_t> out(L);
  for (int64_t i = 0; i < L; ++i) {
    double d;
    if (kind == DurationHead::L2) {
      if (K != 1) throw InvalidArgument("L2 head output must be [1 x L]");
      d = std::expm1(v[i]);
    } else {
      if (K != kDurationClasses)
        throw InvalidArgument("XE head output must be [classes x L]");
      int best = 0;
      for (int64_t k = 1; k < K; ++k)
        if (v[k * L + i] > v[best * L + i]) best = static_cast<int>(k);
      d = static_cast<double>(class_to_duration(best));
    }
    int64_t di = std::llround(d / speed);
    if (di < 0) di = 0;
    if (di == 0 && tokens.ids[i] != blank) di = 1;
    out[i] = di;
  }
  return out;
}

Tensor mel_forward(MelGenerator& m, const Tensor& expanded, Mode mode,
                   Rng& rng) {
  if (expanded.rank() != 2 || expanded.dim(0) != m.embed_dim)
    throw InvalidArgument("mel generator expects a [" +
                          std::to_string(m.embed_dim) + " x L] input");
  return stack_forward(m.blocks, m.head, expanded, mode, rng);
}

MelSpectrogram generate_mel(MelGenerator& m, const Tensor& expanded,
                            const MelConfig& cfg) {
  NoGradGuard no_grad;
  Rng rng(0);  // eval mode consumes no draws
  const Tensor out = mel_forward(m, expanded, Mode::Eval, rng);
  MelSpectrogram mel;
  mel.config = cfg;
  mel.n_mels = m.n_mels;
  mel.frames = out.dim(1);
  mel.data.resize(static_cast<size_t>(mel.frames) * m.n_mels);
  std::span<const double> v = out.values();
  for (int64_t t = 0; t < mel.frames; ++t)
    for (int c = 0; c < m.n_mels; ++c)
      mel.at(t, c) = v[static_cast<size_t>(c) * mel.frames + t];
  return mel;
}

}  // namespace tnet
