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
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "tnet/error.hpp"
#include "tnet/models.hpp"
#include "tnet/textproc.hpp"

using namespace tnet;

namespace {

// Independent parameter accounting from a block list, written against the
// layer recipe rather than the tensors the builders allocate.
int64_t expected_params(int64_t vocab, int64_t embed,
                        const std::vector<BlockSpec>& blocks,
                        int64_t head_out) {
  int64_t total = vocab * embed;
  int64_t in_ch = embed;
  for (const BlockSpec& b : blocks) {
    int64_t ch = in_ch;
    for (int s = 0; s < b.sub_blocks; ++s) {
      total += ch * b.kernel;          // depthwise, one filter per channel
      total += b.channels * ch;        // pointwise
      total += 2 * b.channels;         // bn gamma + beta
      ch = b.channels;
    }
    if (b.residual) total += b.channels * in_ch + 2 * b.channels;
    in_ch = b.channels;
  }
  total += head_out * in_ch + head_out;  // 1x1 head with bias
  return total;
}

TokenSequence blanked(const std::string& text,
                      const std::shared_ptr<const Vocabulary>& vocab) {
  return insert_blanks(tokenize(text, vocab));
}

}  // namespace

TEST_CASE("duration class ids are the identity below 16") {
  for (int64_t d = 0; d < 16; ++d) CHECK(duration_to_class(d) == d);
  CHECK_THROWS_AS(duration_to_class(-1), InvalidArgument);
}

TEST_CASE("duration classes are monotone and clamp at the top") {
  int prev = 0;
  for (int64_t d = 0; d <= 2000; ++d) {
    const int c = duration_to_class(d);
    CHECK(c >= prev);
    CHECK(c < kDurationClasses);
    prev = c;
  }
  CHECK(duration_to_class(512) == kDurationClasses - 1);
  CHECK(duration_to_class(100000) == kDurationClasses - 1);
}

TEST_CASE("class representatives round-trip through the bucket map") {
  for (int c = 0; c < kDurationClasses; ++c) {
    const int64_t d = class_to_duration(c);
    CHECK(duration_to_class(d) == c);
    if (c < 16) CHECK(d == c);
  }
  // First geometric bucket midpoint: 16 * 32^(0.5/16) = 17.83 -> 18.
  CHECK(class_to_duration(16) == 18);
  CHECK_THROWS_AS(class_to_duration(-1), InvalidArgument);
  CHECK_THROWS_AS(class_to_duration(kDurationClasses), InvalidArgument);
}

TEST_CASE("default architectures land on the published budgets") {
  auto vocab = Vocabulary::standard();
  Rng rng(1);
  DurationPredictor dx =
      build_duration_predictor(DurationHead::XE, vocab, rng);
  DurationPredictor dl =
      build_duration_predictor(DurationHead::L2, vocab, rng);
  MelGenerator mel = build_mel_generator(vocab, rng);

  CHECK(dx.parameter_count() ==
        expected_params(vocab->size(), 64, default_duration_blocks(),
                        kDurationClasses));
  CHECK(dl.parameter_count() ==
        expected_params(vocab->size(), 64, default_duration_blocks(), 1));
  CHECK(mel.parameter_count() ==
        expected_params(vocab->size(), 256, default_mel_blocks(), 80));

  // Frozen totals; a change here breaks checkpoint compatibility.
  CHECK(dx.parameter_count() == 2341728);
  CHECK(dl.parameter_count() == 2325825);
  CHECK(mel.parameter_count() == 7930448);
}

TEST_CASE("parameter and buffer names are unique and complete") {
  auto vocab = Vocabulary::standard();
  Rng rng(3);
  DurationPredictor m = build_duration_predictor(DurationHead::L2, vocab, rng);

  std::set<std::string> names;
  int64_t total = 0;
  for (const auto& p : m.parameters()) {
    CHECK(p.tensor.defined());
    CHECK(names.insert(p.name).second);
    total += p.tensor.numel();
  }
  CHECK(total == m.parameter_count());

  std::set<std::string> buffer_names;
  for (const auto& b : m.buffers()) {
    CHECK(b.data != nullptr);
    CHECK_FALSE(b.data->empty());
    CHECK(buffer_names.insert(b.name).second);
    CHECK(names.count(b.name) == 0);
  }
  // Two buffers per batch norm: 5 blocks * 5 subs + 3 + 5 residual = 33 bns.
  int64_t bns = 0;
  for (const BlockSpec& b : default_duration_blocks())
    bns += b.sub_blocks + (b.residual ? 1 : 0);
  CHECK(static_cast<int64_t>(m.buffers().size()) == 2 * bns);
}

TEST_CASE("same seed builds identical models, different seeds do not") {
  auto vocab = Vocabulary::standard();
  Rng a(11), b(11), c(12);
  MelGenerator ma = build_mel_generator(vocab, a, 16, 8, {{2, 8, 3}});
  MelGenerator mb = build_mel_generator(vocab, b, 16, 8, {{2, 8, 3}});
  MelGenerator mc = build_mel_generator(vocab, c, 16, 8, {{2, 8, 3}});

  auto pa = ma.parameters();
  auto pb = mb.parameters();
  auto pc = mc.parameters();
  REQUIRE(pa.size() == pb.size());
  bool any_diff = false;
  for (size_t i = 0; i < pa.size(); ++i) {
    auto va = pa[i].tensor.values();
    auto vb = pb[i].tensor.values();
    REQUIRE(va.size() == vb.size());
    for (size_t j = 0; j < va.size(); ++j) CHECK(va[j] == vb[j]);
    auto vc = pc[i].tensor.values();
    for (size_t j = 0; j < va.size(); ++j)
      if (va[j] != vc[j]) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("initial weights respect the fan-in bound") {
  auto vocab = Vocabulary::standard();
  Rng rng(5);
  DurationPredictor m = build_duration_predictor(DurationHead::XE, vocab, rng);
  // Head: 1x1 over 512 channels.
  const double bound = std::sqrt(6.0 / 512.0);
  for (double w : m.head.weight.values()) CHECK(std::abs(w) <= bound);
  for (double b : m.head.bias.values()) CHECK(b == 0.0);
  // Embedding draws are small normals.
  for (double e : m.embedding.values()) CHECK(std::abs(e) < 0.25);
}

TEST_CASE("predict_durations emits one column per token") {
  auto vocab = Vocabulary::standard();
  Rng rng(7);
  std::vector<BlockSpec> small = {{1, 12, 3, 0.0, false}, {2, 12, 5, 0.0, true}};
  DurationPredictor l2 =
      build_duration_predictor(DurationHead::L2, vocab, rng, 8, small);
  DurationPredictor xe =
      build_duration_predictor(DurationHead::XE, vocab, rng, 8, small);

  const TokenSequence toks = blanked("ab c", vocab);
  Rng r1(0), r2(999);
  const Tensor out_l2 = predict_durations(l2, toks, Mode::Eval, r1);
  CHECK(out_l2.dim(0) == 1);
  CHECK(out_l2.dim(1) == toks.size());
  const Tensor out_xe = predict_durations(xe, toks, Mode::Eval, r1);
  CHECK(out_xe.dim(0) == kDurationClasses);
  CHECK(out_xe.dim(1) == toks.size());

  // Eval mode is deterministic and consumes no randomness.
  const Tensor again = predict_durations(l2, toks, Mode::Eval, r2);
  auto u = out_l2.values();
  auto v = again.values();
  for (size_t i = 0; i < u.size(); ++i) CHECK(u[i] == v[i]);

  CHECK_THROWS_AS(
      predict_durations(l2, tokenize("ab", vocab), Mode::Eval, r1),
      InvalidArgument);
}

TEST_CASE("predict_durations matches vocabularies by content") {
  Rng rng(7);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  auto vocab = Vocabulary::standard();
  DurationPredictor m =
      build_duration_predictor(DurationHead::L2, vocab, rng, 8, small);

  // Equal content, distinct object: accepted.
  auto clone = std::make_shared<Vocabulary>(*vocab);
  Rng r(0);
  CHECK_NOTHROW(predict_durations(m, blanked("ab", clone), Mode::Eval, r));

  auto tiny = Vocabulary::from_symbols({U'~', U'*', U' ', U'a', U'b'});
  CHECK_THROWS_AS(predict_durations(m, blanked("ab", tiny), Mode::Eval, r),
                  InvalidArgument);
}

TEST_CASE("decode_durations inverts the L2 log target") {
  auto vocab = Vocabulary::standard();
  TokenSequence toks = blanked("ab", vocab);  // ~ a ~ b ~
  REQUIRE(toks.size() == 5);
  std::vector<double> head = {std::log1p(2.0), std::log1p(3.0),
                              std::log1p(0.0), std::log1p(4.4), -0.7};
  const Tensor t = Tensor::from_data({1, 5}, head);
  const auto d = decode_durations(t, DurationHead::L2, toks);
  // Blanks may be zero (the last has a negative prediction, clamped);
  // 4.4 rounds to 4.
  CHECK(d == std::vector<int64_t>{2, 3, 0, 4, 0});
}

TEST_CASE("decode_durations never gives a character zero frames") {
  auto vocab = Vocabulary::standard();
  TokenSequence toks = blanked("ab", vocab);
  std::vector<double> head(5, std::log1p(0.2));  // rounds to zero everywhere
  const Tensor t = Tensor::from_data({1, 5}, head);
  const auto d = decode_durations(t, DurationHead::L2, toks);
  CHECK(d == std::vector<int64_t>{0, 1, 0, 1, 0});
}

TEST_CASE("decode_durations applies speed before rounding") {
  auto vocab = Vocabulary::standard();
  TokenSequence toks = blanked("a", vocab);  // ~ a ~
  std::vector<double> head = {std::log1p(6.0), std::log1p(6.0),
                              std::log1p(6.0)};
  const Tensor t = Tensor::from_data({1, 3}, head);
  CHECK(decode_durations(t, DurationHead::L2, toks, 2.0) ==
        std::vector<int64_t>{3, 3, 3});
  CHECK(decode_durations(t, DurationHead::L2, toks, 0.5) ==
        std::vector<int64_t>{12, 12, 12});
  CHECK_THROWS_AS(decode_durations(t, DurationHead::L2, toks, 0.0),
                  InvalidArgument);
  CHECK_THROWS_AS(decode_durations(t, DurationHead::L2, toks, -1.0),
                  InvalidArgument);
}

TEST_CASE("decode_durations takes the argmax class, first on ties") {
  auto vocab = Vocabulary::standard();
  TokenSequence toks = blanked("a", vocab);
  std::vector<double> logits(kDurationClasses * 3, 0.0);
  // Column 0: peak at class 5. Column 1: tie between 3 and 7.
  // Column 2: peak at the first geometric bucket.
  logits[5 * 3 + 0] = 4.0;
  logits[3 * 3 + 1] = 2.0;
  logits[7 * 3 + 1] = 2.0;
  logits[16 * 3 + 2] = 1.0;
  const Tensor t = Tensor::from_data({kDurationClasses, 3}, logits);
  const auto d = decode_durations(t, DurationHead::XE, toks);
  CHECK(d == std::vector<int64_t>{5, 3, 18});
}

TEST_CASE("decode_durations validates head shapes") {
  auto vocab = Vocabulary::standard();
  TokenSequence toks = blanked("a", vocab);
  const Tensor two_rows = Tensor::zeros({2, 3});
  CHECK_THROWS_AS(decode_durations(two_rows, DurationHead::L2, toks),
                  InvalidArgument);
  CHECK_THROWS_AS(decode_durations(two_rows, DurationHead::XE, toks),
                  InvalidArgument);
  const Tensor wrong_len = Tensor::zeros({1, 4});
  CHECK_THROWS_AS(decode_durations(wrong_len, DurationHead::L2, toks),
                  InvalidArgument);
  CHECK_THROWS_AS(
      decode_durations(Tensor::zeros({1, 2}), DurationHead::L2,
                       tokenize("ab", vocab)),
      InvalidArgument);
}

TEST_CASE("mel stack preserves length and fills the frame-major container") {
  auto vocab = Vocabulary::standard();
  Rng rng(9);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}, {2, 8, 5, 0.0, true}};
  MelGenerator m = build_mel_generator(vocab, rng, 8, 6, small);

  TokenSequence toks = blanked("ab", vocab);
  std::vector<int64_t> durations = {1, 2, 1, 3, 1};
  const Tensor x = embed_expanded(toks, durations, m.embedding);
  REQUIRE(x.dim(1) == 8);

  Rng r(0);
  const Tensor out = mel_forward(m, x, Mode::Eval, r);
  CHECK(out.dim(0) == 6);
  CHECK(out.dim(1) == 8);

  MelConfig cfg;
  const MelSpectrogram mel = generate_mel(m, x, cfg);
  CHECK(mel.frames == 8);
  CHECK(mel.n_mels == 6);
  auto v = out.values();
  for (int64_t t = 0; t < mel.frames; ++t)
    for (int c = 0; c < mel.n_mels; ++c)
      CHECK(mel.at(t, c) == v[static_cast<size_t>(c) * mel.frames + t]);

  CHECK_THROWS_AS(mel_forward(m, Tensor::zeros({4, 8}), Mode::Eval, r),
                  InvalidArgument);
}

TEST_CASE("eval forward leaves running statistics untouched") {
  auto vocab = Vocabulary::standard();
  Rng rng(13);
  std::vector<BlockSpec> small = {{2, 8, 3, 0.1, true}};
  MelGenerator m = build_mel_generator(vocab, rng, 8, 4, small);

  auto snapshot = [&]() {
    std::vector<double> all;
    for (const auto& b : m.buffers())
      all.insert(all.end(), b.data->begin(), b.data->end());
    return all;
  };

  TokenSequence toks = blanked("a", vocab);
  std::vector<int64_t> durations = {1, 4, 1};
  const Tensor x = embed_expanded(toks, durations, m.embedding);

  const auto before = snapshot();
  Rng r(0);
  const Tensor o1 = mel_forward(m, x, Mode::Eval, r);
  const Tensor o2 = mel_forward(m, x, Mode::Eval, r);
  CHECK(snapshot() == before);
  auto a = o1.values();
  auto b = o2.values();
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  // Train mode does move them.
  Rng rt(1);
  (void)mel_forward(m, x, Mode::Train, rt);
  CHECK(snapshot() != before);
}

TEST_CASE("an untrained pipeline produces finite outputs end to end") {
  auto vocab = Vocabulary::standard();
  Rng rng(21);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  DurationPredictor dp =
      build_duration_predictor(DurationHead::XE, vocab, rng, 8, small);
  MelGenerator mg = build_mel_generator(vocab, rng, 8, 4, small);

  TokenSequence toks = blanked("hello world", vocab);
  Rng r(0);
  const Tensor head = predict_durations(dp, toks, Mode::Eval, r);
  const auto durations = decode_durations(head, DurationHead::XE, toks);
  REQUIRE(durations.size() == static_cast<size_t>(toks.size()));
  int64_t total = 0;
  for (size_t i = 0; i < durations.size(); ++i) {
    CHECK(durations[i] >= 0);
    if (toks.ids[i] != vocab->blank_id()) CHECK(durations[i] >= 1);
    total += durations[i];
  }
  const Tensor x = embed_expanded(toks, durations, mg.embedding);
  CHECK(x.dim(1) == total);
  const Tensor mel = mel_forward(mg, x, Mode::Eval, r);
  for (double v : mel.values()) CHECK(std::isfinite(v));
}
