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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "tnet/error.hpp"
#include "tnet/train.hpp"

using namespace tnet;

namespace {

TokenSequence blanked(const std::string& text,
                      const std::shared_ptr<const Vocabulary>& vocab) {
  return insert_blanks(tokenize(text, vocab));
}

// Small duration corpus with varied lengths; durations are arbitrary but
// keep every character at one frame or more.
std::vector<DurationItem> duration_corpus(
    const std::shared_ptr<const Vocabulary>& vocab) {
  std::vector<DurationItem> items;
  const std::vector<std::pair<std::string, std::vector<int64_t>>> spec = {
      {"ab", {1, 2, 0, 3, 1}},
      {"cat", {0, 2, 1, 4, 0, 2, 1}},
      {"hi", {2, 1, 1, 2, 0}},
      {"go on", {0, 3, 1, 2, 0, 1, 0, 2, 1, 3, 0}},
  };
  for (const auto& [text, durs] : spec) {
    DurationItem it;
    it.name = text;
    it.tokens = blanked(text, vocab);
    it.durations = durs;
    REQUIRE(it.tokens.size() == static_cast<int64_t>(durs.size()));
    items.push_back(std::move(it));
  }
  return items;
}

MelSpectrogram flat_target(int64_t frames, int n_mels, double value) {
  MelSpectrogram mel;
  mel.frames = frames;
  mel.n_mels = n_mels;
  mel.data.assign(static_cast<size_t>(frames) * n_mels, value);
  return mel;
}

std::vector<MelItem> mel_corpus(
    const std::shared_ptr<const Vocabulary>& vocab, int n_mels) {
  std::vector<MelItem> items;
  const std::vector<std::pair<std::string, std::vector<int64_t>>> spec = {
      {"ab", {1, 2, 0, 3, 1}},
      {"no", {0, 2, 1, 4, 1}},
  };
  double level = -1.0;
  for (const auto& [text, durs] : spec) {
    MelItem it;
    it.name = text;
    it.tokens = blanked(text, vocab);
    it.durations = durs;
    const int64_t total = std::accumulate(durs.begin(), durs.end(), int64_t{0});
    it.target = flat_target(total, n_mels, level);
    level += 0.5;
    items.push_back(std::move(it));
  }
  return items;
}

std::vector<double> param_values(std::vector<NamedParam> params) {
  std::vector<double> out;
  for (const auto& p : params) {
    auto v = p.tensor.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace

TEST_CASE("make_duration_item maps tokens through the vocabulary") {
  auto vocab = Vocabulary::standard();
  DurationMap d;
  d.tokens = {U'~', U'a', U'~', U'b', U'~'};
  d.durations = {0, 2, 1, 3, 0};
  d.total_frames = 6;
  const DurationItem it = make_duration_item("u1", d, vocab);
  CHECK(it.name == "u1");
  CHECK(it.tokens.has_blanks);
  CHECK(it.tokens.ids == std::vector<int>{0, 3, 0, 4, 0});
  CHECK(it.durations == d.durations);
}

TEST_CASE("make_duration_item sends unknown symbols to the unknown id") {
  auto vocab = Vocabulary::standard();
  DurationMap d;
  d.tokens = {U'~', U'é', U'~'};
  d.durations = {1, 2, 1};
  d.total_frames = 4;
  const DurationItem it = make_duration_item("oov", d, vocab);
  CHECK(it.tokens.ids == std::vector<int>{0, 1, 0});
}

TEST_CASE("make_mel_item rejects duration/frame disagreements") {
  auto vocab = Vocabulary::standard();
  DurationMap d;
  d.tokens = {U'~', U'a', U'~'};
  d.durations = {1, 3, 1};
  d.total_frames = 5;
  CHECK_NOTHROW(make_mel_item("ok", d, flat_target(5, 4, 0.0), vocab));
  CHECK_THROWS_AS(make_mel_item("off", d, flat_target(6, 4, 0.0), vocab),
                  InvalidArgument);
}

TEST_CASE("augment_durations conserves totals and respects floors") {
  auto vocab = Vocabulary::standard();
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenSequence toks = blanked("some text here", vocab);
    std::vector<int64_t> durs(toks.size());
    for (auto& d : durs) d = static_cast<int64_t>(rng.uniform() * 6);
    for (int64_t i = 1; i < toks.size(); i += 2)
      durs[i] = std::max<int64_t>(durs[i], 1);
    const int64_t total = std::accumulate(durs.begin(), durs.end(), int64_t{0});

    const auto out = augment_durations(durs, toks, 0.4, rng);
    REQUIRE(out.size() == durs.size());
    CHECK(std::accumulate(out.begin(), out.end(), int64_t{0}) == total);
    for (int64_t i = 0; i < toks.size(); ++i) {
      if (toks.ids[i] == vocab->blank_id())
        CHECK(out[i] >= 0);
      else
        CHECK(out[i] >= 1);
    }
  }
}

TEST_CASE("augment_durations is the documented pairwise transfer") {
  auto vocab = Vocabulary::standard();
  const TokenSequence toks = blanked("abcd", vocab);
  const std::vector<int64_t> durs = {2, 5, 0, 7, 3, 1, 4, 6, 0};
  REQUIRE(toks.size() == static_cast<int64_t>(durs.size()));

  Rng used(91), replay(91);
  const auto got = augment_durations(durs, toks, 0.6, used);

  // One signed uniform per adjacent pair, delta proportional to the
  // smaller neighbor, clamped so characters keep a frame and nothing
  // goes negative; applied left to right on the evolving array.
  std::vector<int64_t> expect = durs;
  for (size_t i = 0; i + 1 < expect.size(); ++i) {
    const double u = 2.0 * replay.uniform() - 1.0;
    int64_t delta = std::llround(
        u * 0.6 * static_cast<double>(std::min(expect[i], expect[i + 1])));
    const int64_t floor_i = toks.ids[i] == vocab->blank_id() ? 0 : 1;
    const int64_t floor_j = toks.ids[i + 1] == vocab->blank_id() ? 0 : 1;
    delta = std::min(delta, expect[i] - floor_i);
    delta = std::max(delta, -(expect[i + 1] - floor_j));
    expect[i] -= delta;
    expect[i + 1] += delta;
  }
  CHECK(got == expect);
}

TEST_CASE("augment with zero strength is the identity") {
  auto vocab = Vocabulary::standard();
  const TokenSequence toks = blanked("abc", vocab);
  const std::vector<int64_t> durs = {1, 4, 2, 3, 0, 5, 1};
  Rng rng(1);
  CHECK(augment_durations(durs, toks, 0.0, rng) == durs);
  CHECK_THROWS_AS(augment_durations(durs, toks, -0.1, rng), InvalidArgument);
  CHECK_THROWS_AS(augment_durations({1, 2}, toks, 0.1, rng), InvalidArgument);
}

TEST_CASE("duration_metrics agrees with a hand-computed fixture") {
  const std::vector<int64_t> pred = {2, 3, 0, 5, 1};
  const std::vector<int64_t> ref = {2, 4, 0, 9, 1};
  const EvalReport r = duration_metrics(pred, ref);
  CHECK(r.tokens == 5);
  CHECK(r.mse == (0.0 + 1.0 + 0.0 + 16.0 + 0.0) / 5.0);
  CHECK(r.accuracy_pct == 60.0);
  CHECK(r.within1_pct == 80.0);
  CHECK(r.within3_pct == 80.0);

  CHECK_THROWS_AS(duration_metrics({1, 2}, {1}), InvalidArgument);
  CHECK_THROWS_AS(duration_metrics({}, {}), InvalidArgument);
}

TEST_CASE("format_eval prints a header and matching values") {
  EvalReport r;
  r.mse = 3.4;
  r.accuracy_pct = 60.0;
  r.within1_pct = 80.0;
  r.within3_pct = 80.0;
  r.tokens = 5;
  const std::string s = format_eval(r);
  CHECK(s == "mse\taccuracy_pct\twithin1_pct\twithin3_pct\n3.4\t60\t80\t80\n");
}

TEST_CASE("trainer logs follow the schedule and stay finite") {
  auto vocab = Vocabulary::standard();
  Rng init(41);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  DurationPredictor model =
      build_duration_predictor(DurationHead::L2, vocab, init, 8, small);

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 9;
  DurationTrainer tr(model, duration_corpus(vocab), cfg);
  const auto log = tr.run();

  // 4 items, batch 4: one step per epoch.
  REQUIRE(log.size() == 2);
  CHECK(tr.schedule().total_steps == 2);
  for (size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].epoch == static_cast<int64_t>(i + 1));
    CHECK(log[i].step == static_cast<int64_t>(i + 1));
    CHECK(std::isfinite(log[i].loss));
    CHECK(log[i].lr == lr_at(tr.schedule(), log[i].step));
  }
}

TEST_CASE("identical seeds train bit-identically") {
  auto vocab = Vocabulary::standard();
  std::vector<BlockSpec> small = {{1, 8, 3, 0.1, false}};
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.seed = 55;

  auto run_once = [&]() {
    Rng init(17);
    DurationPredictor model =
        build_duration_predictor(DurationHead::XE, vocab, init, 8, small);
    DurationTrainer tr(model, duration_corpus(vocab), cfg);
    const auto log = tr.run();
    return std::make_pair(log, param_values(model.parameters()));
  };

  const auto [log_a, params_a] = run_once();
  const auto [log_b, params_b] = run_once();
  REQUIRE(log_a.size() == log_b.size());
  for (size_t i = 0; i < log_a.size(); ++i) CHECK(log_a[i].loss == log_b[i].loss);
  CHECK(params_a == params_b);

  // A different data seed diverges.
  cfg.seed = 56;
  const auto [log_c, params_c] = run_once();
  CHECK(params_a != params_c);
}

TEST_CASE("a mid-run snapshot resumes bit-exactly") {
  auto vocab = Vocabulary::standard();
  std::vector<BlockSpec> small = {{1, 8, 3, 0.1, false}, {2, 8, 5, 0.1, true}};
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 2;
  cfg.seed = 123;

  Rng init(29);
  DurationPredictor model =
      build_duration_predictor(DurationHead::L2, vocab, init, 8, small);
  DurationTrainer tr(model, duration_corpus(vocab), cfg);
  Checkpoint mid;
  tr.run([&](int64_t epoch, double) {
    if (epoch == 3) mid = tr.snapshot();
  });
  const auto straight = param_values(model.parameters());

  REQUIRE(mid.train.present);
  CHECK(mid.train.epoch == 3);
  DurationPredictor resumed_model = duration_predictor_from(mid);
  DurationTrainer tr2(resumed_model, duration_corpus(vocab), cfg);
  tr2.resume_from(mid);
  tr2.run();
  CHECK(param_values(resumed_model.parameters()) == straight);
}

TEST_CASE("mel trainer validates duration sums against the target") {
  auto vocab = Vocabulary::standard();
  Rng init(3);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  MelGenerator model = build_mel_generator(vocab, init, 8, 4, small);
  auto items = mel_corpus(vocab, 4);
  items[0].target.frames -= 1;
  items[0].target.data.resize(
      static_cast<size_t>(items[0].target.frames) * 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(MelTrainer(model, items, cfg), InvalidArgument);

  // Alternate input durations must cover the same number of frames.
  auto items2 = mel_corpus(vocab, 4);
  items2[0].alt_durations = items2[0].durations;
  items2[0].alt_durations[0] += 1;
  CHECK_THROWS_AS(MelTrainer(model, items2, cfg, false, false),
                  InvalidArgument);
}

TEST_CASE("mel training with augmentation is reproducible") {
  auto vocab = Vocabulary::standard();
  std::vector<BlockSpec> small = {{1, 8, 3, 0.1, false}};
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 1;
  cfg.seed = 8;
  cfg.p_augment = 1.0;

  auto run_once = [&]() {
    Rng init(19);
    MelGenerator model = build_mel_generator(vocab, init, 8, 4, small);
    const auto log = train_mel(model, mel_corpus(vocab, 4), cfg, true, true);
    return std::make_pair(log, param_values(model.parameters()));
  };
  const auto [log_a, params_a] = run_once();
  const auto [log_b, params_b] = run_once();
  REQUIRE(log_a.size() == log_b.size());
  for (size_t i = 0; i < log_a.size(); ++i) CHECK(log_a[i].loss == log_b[i].loss);
  CHECK(params_a == params_b);
}

TEST_CASE("calibration pins running stats to the corpus statistics") {
  set_precision(Precision::F64);
  auto vocab = Vocabulary::standard();
  Rng init(61);
  std::vector<BlockSpec> small = {{2, 8, 3, 0.0, true}};
  MelGenerator model = build_mel_generator(vocab, init, 8, 4, small);

  auto items = mel_corpus(vocab, 4);
  items.resize(1);  // single item: corpus stats equal its batch stats
  calibrate_batchnorm(model, items);

  const Tensor x =
      embed_expanded(items[0].tokens, items[0].durations, model.embedding);
  NoGradGuard ng;
  Rng r(0);
  const Tensor eval_out = mel_forward(model, x, Mode::Eval, r);
  const Tensor batch_out = mel_forward(model, x, Mode::Calibrate, r);
  for (auto& b : model.blocks) {
    for (auto& sb : b.subs) sb.norm.state.reset_calibration();
    b.proj_norm.state.reset_calibration();
  }
  auto ve = eval_out.values();
  auto vb = batch_out.values();
  REQUIRE(ve.size() == vb.size());
  for (size_t i = 0; i < ve.size(); ++i)
    CHECK(ve[i] == doctest::Approx(vb[i]).epsilon(1e-9));

  // Calibrating again from the same corpus is a fixed point.
  std::vector<double> stats_before;
  for (const auto& b : model.buffers())
    stats_before.insert(stats_before.end(), b.data->begin(), b.data->end());
  calibrate_batchnorm(model, items);
  std::vector<double> stats_after;
  for (const auto& b : model.buffers())
    stats_after.insert(stats_after.end(), b.data->begin(), b.data->end());
  for (size_t i = 0; i < stats_before.size(); ++i)
    CHECK(stats_before[i] == doctest::Approx(stats_after[i]).epsilon(1e-12));
  set_precision(Precision::F32);
}

TEST_CASE("synthesize runs the full path and sizes line up") {
  auto vocab = Vocabulary::standard();
  Rng init(77);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  DurationPredictor dp =
      build_duration_predictor(DurationHead::XE, vocab, init, 8, small);
  MelGenerator mg = build_mel_generator(vocab, init, 8, 20, small);

  MelConfig cfg;
  cfg.sample_rate = 8000;
  cfg.window_ms = 16.0;
  cfg.hop_ms = 8.0;
  cfg.n_mels = 20;

  const SynthesisResult r = synthesize("ab ba", dp, mg, cfg, 1.0, 4, 5);
  CHECK(r.tokens.ids == blanked("ab ba", vocab).ids);
  REQUIRE(r.durations.size() == static_cast<size_t>(r.tokens.size()));
  const int64_t total =
      std::accumulate(r.durations.begin(), r.durations.end(), int64_t{0});
  CHECK(r.mel.frames == total);
  CHECK(r.mel.n_mels == 20);
  const int64_t expect_len =
      total * cfg.hop_length() + (cfg.win_length() - cfg.hop_length());
  CHECK(static_cast<int64_t>(r.audio.samples.size()) == expect_len);
  CHECK(r.audio.sample_rate == cfg.sample_rate);
  for (double s : r.audio.samples) {
    CHECK(std::isfinite(s));
    CHECK(std::abs(s) <= 1.0);
  }

  // Faster speech shortens the plan.
  const SynthesisResult fast = synthesize("ab ba", dp, mg, cfg, 2.0, 2, 5);
  const int64_t fast_total =
      std::accumulate(fast.durations.begin(), fast.durations.end(), int64_t{0});
  CHECK(fast_total <= total);
  CHECK(fast_total > 0);

  CHECK_THROWS_AS(synthesize("", dp, mg, cfg), InvalidArgument);

  // Model vocabularies must agree.
  Rng init2(78);
  auto tiny = Vocabulary::from_symbols({U'~', U'*', U' ', U'a', U'b'});
  MelGenerator other = build_mel_generator(tiny, init2, 8, 20, small);
  CHECK_THROWS_AS(synthesize("ab", dp, other, cfg), InvalidArgument);
}

TEST_CASE("benchmark_latency reports one point per length") {
  auto vocab = Vocabulary::standard();
  Rng init(5);
  std::vector<BlockSpec> small = {{1, 8, 3, 0.0, false}};
  MelGenerator model = build_mel_generator(vocab, init, 8, 4, small);

  const LatencyReport rep = benchmark_latency(model, {16, 32}, 2, 1);
  REQUIRE(rep.points.size() == 2);
  for (const auto& p : rep.points) {
    CHECK(p.seconds > 0.0);
    CHECK(p.frames_per_sec ==
          doctest::Approx(static_cast<double>(p.length) / p.seconds));
  }
  CHECK(rep.points[0].length == 16);
  CHECK(rep.points[1].length == 32);
  CHECK(std::isfinite(rep.scaling_exponent));

  const LatencyReport single = benchmark_latency(model, {16}, 1, 1);
  CHECK(std::isnan(single.scaling_exponent));
}
