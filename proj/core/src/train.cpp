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

#include "tnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tnet/error.hpp"

namespace tnet {

namespace {

std::vector<Tensor> param_tensors(std::vector<NamedParam> params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (auto& p : params) out.push_back(p.tensor);
  return out;
}

void fill_schedule(LrSchedule& s, int64_t epochs, int64_t n_items,
                   int64_t batch) {
  if (s.total_steps > 0) return;
  const int64_t steps_per_epoch = (n_items + batch - 1) / batch;
  s.total_steps = epochs * steps_per_epoch;
}

void shuffle_indices(std::vector<size_t>& idx, Rng& rng) {
  for (size_t i = idx.size(); i > 1; --i) {
    const size_t j = rng.next_u64() % i;
    std::swap(idx[i - 1], idx[j]);
  }
}

std::vector<BatchNormState*> bn_states(std::vector<ConvBlock>& blocks) {
  std::vector<BatchNormState*> out;
  for (ConvBlock& b : blocks) {
    for (SubBlock& sb : b.subs) out.push_back(&sb.norm.state);
    if (b.spec.residual) out.push_back(&b.proj_norm.state);
  }
  return out;
}

// Shared epoch loop. loss_fn(index, inv_batch) runs the forward, scales
// the loss by inv_batch, backpropagates and returns the unscaled value.
struct Loop {
  std::vector<Tensor> params;
  Adam* opt;
  Rng* rng;
  const TrainConfig* cfg;
  const LrSchedule* schedule;
  int64_t* epoch_done;
  int64_t* global_step;
  size_t n_items;

  std::vector<TrainLogEntry> run(
      const std::function<double(size_t, double)>& loss_fn,
      const std::function<void()>& calibrate, const EpochHook& hook) {
    std::vector<TrainLogEntry> log;
    std::vector<size_t> idx(n_items);
    std::iota(idx.begin(), idx.end(), 0);
    const int64_t batch = std::max<int64_t>(1, cfg->batch_size);
    for (int64_t epoch = *epoch_done + 1; epoch <= cfg->epochs; ++epoch) {
      // Restart from the identity so the epoch's order is a function of the
      // rng state alone; a resumed run then replays the same batches.
      std::iota(idx.begin(), idx.end(), 0);
      shuffle_indices(idx, *rng);
      double epoch_sum = 0.0;
      int64_t epoch_steps = 0;
      for (size_t start = 0; start < n_items;
           start += static_cast<size_t>(batch)) {
        const size_t bsz =
            std::min<size_t>(static_cast<size_t>(batch), n_items - start);
        for (Tensor& p : params) p.zero_grad();
        double batch_loss = 0.0;
        for (size_t k = 0; k < bsz; ++k)
          batch_loss += loss_fn(idx[start + k], 1.0 / bsz);
        batch_loss /= static_cast<double>(bsz);
        clip_global_norm(params, cfg->clip_norm);
        ++*global_step;
        const double lr = lr_at(*schedule, *global_step);
        opt->step(params, lr);
        log.push_back({epoch, *global_step, batch_loss, lr});
        epoch_sum += batch_loss;
        ++epoch_steps;
      }
      *epoch_done = epoch;
      if (hook) hook(epoch, epoch_sum / static_cast<double>(epoch_steps));
    }
    calibrate();
    return log;
  }
};

void check_finite(double loss, int64_t step, const std::string& item) {
  if (std::isfinite(loss)) return;
  throw Error("loss went non-finite (" + std::to_string(loss) +
              ") after step " + std::to_string(step) + " on item '" + item +
              "'; lower the learning rate or check the input data");
}

void resume_common(const Checkpoint& ck, Adam& opt,
                   std::vector<NamedParam> params, Rng& rng,
                   int64_t& epoch_done, int64_t& global_step,
                   LrSchedule& schedule) {
  if (!ck.train.present)
    throw InvalidArgument("checkpoint carries no training state to resume");
  if (!restore_optimizer_state(ck, opt, std::move(params)))
    throw InvalidArgument("checkpoint carries no optimizer state to resume");
  rng.set_state(ck.train.rng_state);
  epoch_done = ck.train.epoch;
  global_step = ck.train.global_step;
  schedule = ck.train.schedule;
}

}  // namespace

DurationItem make_duration_item(std::string name, const DurationMap& d,
                                std::shared_ptr<const Vocabulary> vocab) {
  d.validate();
  DurationItem it;
  it.name = std::move(name);
  it.tokens.vocab = std::move(vocab);
  it.tokens.has_blanks = true;
  it.tokens.ids.reserve(d.tokens.size());
  for (char32_t c : d.tokens) it.tokens.ids.push_back(it.tokens.vocab->id_of(c));
  it.durations = d.durations;
  return it;
}

MelItem make_mel_item(std::string name, const DurationMap& d,
                      MelSpectrogram target,
                      std::shared_ptr<const Vocabulary> vocab) {
  if (d.total_frames != target.frames)
    throw InvalidArgument("durations for '" + name + "' sum to " +
                          std::to_string(d.total_frames) + " but the mel has " +
                          std::to_string(target.frames) + " frames");
  DurationItem base = make_duration_item(name, d, std::move(vocab));
  MelItem it;
  it.name = std::move(base.name);
  it.tokens = std::move(base.tokens);
  it.durations = std::move(base.durations);
  it.target = std::move(target);
  return it;
}

std::vector<int64_t> augment_durations(const std::vector<int64_t>& durations,
                                       const TokenSequence& tokens,
                                       double strength, Rng& rng) {
  if (durations.size() != tokens.ids.size())
    throw InvalidArgument("augment: token/duration length mismatch");
  if (strength < 0.0) throw InvalidArgument("augment strength must be >= 0");
  std::vector<int64_t> out = durations;
  const int blank = tokens.vocab->blank_id();
  // One pass over adjacent pairs: each transfer is unbiased and
  // proportional to the smaller neighbor, so the total is conserved and
  // short tokens barely move. Clamps keep every duration non-negative and
  // every character at one frame or more.
  for (size_t i = 0; i + 1 < out.size(); ++i) {
    const double u = 2.0 * rng.uniform() - 1.0;
    int64_t delta = std::llround(
        u * strength * static_cast<double>(std::min(out[i], out[i + 1])));
    const int64_t floor_i = tokens.ids[i] == blank ? 0 : 1;
    const int64_t floor_j = tokens.ids[i + 1] == blank ? 0 : 1;
    delta = std::min(delta, out[i] - floor_i);
    delta = std::max(delta, -(out[i + 1] - floor_j));
    out[i] -= delta;
    out[i + 1] += delta;
  }
  return out;
}

DurationTrainer::DurationTrainer(DurationPredictor& model,
                                 std::vector<DurationItem> items,
                                 TrainConfig cfg)
    : model_(model),
      items_(std::move(items)),
      cfg_(cfg),
      schedule_(cfg.schedule),
      opt_(cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay),
      rng_(cfg.seed) {
  if (items_.empty()) throw InvalidArgument("training corpus is empty");
  for (const DurationItem& it : items_)
    if (it.durations.size() != it.tokens.ids.size())
      throw InvalidArgument("item '" + it.name +
                            "' has mismatched tokens and durations");
  fill_schedule(schedule_, cfg_.epochs, static_cast<int64_t>(items_.size()),
                cfg_.batch_size);
}

void DurationTrainer::resume_from(const Checkpoint& ck) {
  resume_common(ck, opt_, model_.parameters(), rng_, epoch_done_,
                global_step_, schedule_);
}

std::vector<TrainLogEntry> DurationTrainer::run(const EpochHook& hook) {
  Loop loop{param_tensors(model_.parameters()), &opt_,          &rng_,
            &cfg_,                              &schedule_,     &epoch_done_,
            &global_step_,                      items_.size()};
  return loop.run(
      [&](size_t i, double inv_batch) {
        const DurationItem& item = items_[i];
        const Tensor out =
            predict_durations(model_, item.tokens, Mode::Train, rng_);
        Tensor loss;
        const int64_t L = item.tokens.size();
        if (model_.head_kind == DurationHead::L2) {
          std::vector<double> target(L);
          for (int64_t t = 0; t < L; ++t)
            target[t] = std::log1p(static_cast<double>(item.durations[t]));
          loss = mse_loss(out, Tensor::from_data({1, L}, std::move(target)));
        } else {
          std::vector<int> classes(L);
          for (int64_t t = 0; t < L; ++t)
            classes[t] = duration_to_class(item.durations[t]);
          loss = xe_loss(out, classes);
        }
        const double v = loss.item();
        check_finite(v, global_step_, item.name);
        scale(loss, inv_batch).backward();
        return v;
      },
      [&] { calibrate_batchnorm(model_, items_); }, hook);
}

Checkpoint DurationTrainer::snapshot() {
  Checkpoint ck = checkpoint_from(model_);
  append_optimizer_state(ck, opt_, model_.parameters());
  ck.seed = cfg_.seed;
  ck.train.present = true;
  ck.train.epoch = epoch_done_;
  ck.train.global_step = global_step_;
  ck.train.adam_t = opt_.t();
  ck.train.rng_state = rng_.state();
  ck.train.schedule = schedule_;
  return ck;
}

MelTrainer::MelTrainer(MelGenerator& model, std::vector<MelItem> items,
                       TrainConfig cfg, bool use_ground_truth_durations,
                       bool augment)
    : model_(model),
      items_(std::move(items)),
      cfg_(cfg),
      schedule_(cfg.schedule),
      opt_(cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay),
      rng_(cfg.seed),
      use_ground_truth_(use_ground_truth_durations),
      augment_(augment) {
  if (items_.empty()) throw InvalidArgument("training corpus is empty");
  for (const MelItem& it : items_) {
    const auto check = [&](const std::vector<int64_t>& d, const char* what) {
      if (d.size() != it.tokens.ids.size())
        throw InvalidArgument("item '" + it.name + "' has mismatched " +
                              what + " durations");
      const int64_t sum = std::accumulate(d.begin(), d.end(), int64_t{0});
      if (sum != it.target.frames)
        throw InvalidArgument("item '" + it.name + "': " + what +
                              " durations sum to " + std::to_string(sum) +
                              " but the mel has " +
                              std::to_string(it.target.frames) + " frames");
    };
    check(it.durations, "teacher");
    if (!use_ground_truth_) {
      if (it.alt_durations.empty())
        throw InvalidArgument("item '" + it.name +
                              "' has no substitute durations but "
                              "use_ground_truth_durations is off");
      check(it.alt_durations, "substitute");
    }
    if (it.target.n_mels != model_.n_mels)
      throw InvalidArgument("item '" + it.name + "' has " +
                            std::to_string(it.target.n_mels) +
                            " mel bands, model expects " +
                            std::to_string(model_.n_mels));
  }
  fill_schedule(schedule_, cfg_.epochs, static_cast<int64_t>(items_.size()),
                cfg_.batch_size);
}

void MelTrainer::resume_from(const Checkpoint& ck) {
  resume_common(ck, opt_, model_.parameters(), rng_, epoch_done_,
                global_step_, schedule_);
}

const std::vector<int64_t>& MelTrainer::input_durations(
    const MelItem& item) const {
  return use_ground_truth_ ? item.durations : item.alt_durations;
}

std::vector<TrainLogEntry> MelTrainer::run(const EpochHook& hook) {
  // Frame-major targets transposed once to the [bands x frames] op layout.
  std::vector<std::vector<double>> targets(items_.size());
  for (size_t i = 0; i < items_.size(); ++i) {
    const MelSpectrogram& m = items_[i].target;
    targets[i].resize(static_cast<size_t>(m.frames) * m.n_mels);
    for (int64_t t = 0; t < m.frames; ++t)
      for (int c = 0; c < m.n_mels; ++c)
        targets[i][static_cast<size_t>(c) * m.frames + t] = m.at(t, c);
  }

  Loop loop{param_tensors(model_.parameters()), &opt_,          &rng_,
            &cfg_,                              &schedule_,     &epoch_done_,
            &global_step_,                      items_.size()};
  return loop.run(
      [&](size_t i, double inv_batch) {
        const MelItem& item = items_[i];
        const std::vector<int64_t>* durs = &input_durations(item);
        std::vector<int64_t> jittered;
        if (augment_ && cfg_.p_augment > 0.0 &&
            rng_.uniform() < cfg_.p_augment) {
          jittered = augment_durations(*durs, item.tokens,
                                       cfg_.augment_strength, rng_);
          durs = &jittered;
        }
        const Tensor expanded =
            embed_expanded(item.tokens, *durs, model_.embedding);
        const Tensor out = mel_forward(model_, expanded, Mode::Train, rng_);
        const Tensor target = Tensor::from_data(
            {model_.n_mels, item.target.frames},
            std::vector<double>(targets[i]));
        Tensor loss = mse_loss(out, target);
        const double v = loss.item();
        check_finite(v, global_step_, item.name);
        scale(loss, inv_batch).backward();
        return v;
      },
      [&] { calibrate_batchnorm(model_, items_); }, hook);
}

Checkpoint MelTrainer::snapshot() {
  Checkpoint ck = checkpoint_from(model_);
  append_optimizer_state(ck, opt_, model_.parameters());
  ck.seed = cfg_.seed;
  ck.mel = items_.front().target.config;
  ck.train.present = true;
  ck.train.epoch = epoch_done_;
  ck.train.global_step = global_step_;
  ck.train.adam_t = opt_.t();
  ck.train.rng_state = rng_.state();
  ck.train.schedule = schedule_;
  return ck;
}

std::vector<TrainLogEntry> train_duration(DurationPredictor& model,
                                          std::vector<DurationItem> items,
                                          const TrainConfig& cfg) {
  DurationTrainer trainer(model, std::move(items), cfg);
  return trainer.run();
}

std::vector<TrainLogEntry> train_mel(MelGenerator& model,
                                     std::vector<MelItem> items,
                                     const TrainConfig& cfg,
                                     bool use_ground_truth_durations,
                                     bool augment) {
  MelTrainer trainer(model, std::move(items), cfg, use_ground_truth_durations,
                     augment);
  return trainer.run();
}

void calibrate_batchnorm(DurationPredictor& model,
                         const std::vector<DurationItem>& items) {
  NoGradGuard no_grad;
  Rng dummy(0);
  for (BatchNormState* s : bn_states(model.blocks)) s->reset_calibration();
  for (const DurationItem& it : items)
    predict_durations(model, it.tokens, Mode::Calibrate, dummy);
  for (BatchNormState* s : bn_states(model.blocks)) s->finalize_calibration();
}

void calibrate_batchnorm(MelGenerator& model,
                         const std::vector<MelItem>& items) {
  NoGradGuard no_grad;
  Rng dummy(0);
  for (BatchNormState* s : bn_states(model.blocks)) s->reset_calibration();
  for (const MelItem& it : items) {
    const Tensor expanded =
        embed_expanded(it.tokens, it.durations, model.embedding);
    mel_forward(model, expanded, Mode::Calibrate, dummy);
  }
  for (BatchNormState* s : bn_states(model.blocks)) s->finalize_calibration();
}

EvalReport duration_metrics(const std::vector<int64_t>& predicted,
                            const std::vector<int64_t>& reference) {
  if (predicted.size() != reference.size())
    throw InvalidArgument("metric inputs differ in length");
  if (predicted.empty()) throw InvalidArgument("metric inputs are empty");
  EvalReport r;
  r.tokens = static_cast<int64_t>(predicted.size());
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double e = static_cast<double>(predicted[i] - reference[i]);
    r.mse += e * e;
    const int64_t a = std::llabs(predicted[i] - reference[i]);
    if (a == 0) r.accuracy_pct += 1.0;
    if (a <= 1) r.within1_pct += 1.0;
    if (a <= 3) r.within3_pct += 1.0;
  }
  const double scale = 100.0 / static_cast<double>(r.tokens);
  r.mse /= static_cast<double>(r.tokens);
  r.accuracy_pct *= scale;
  r.within1_pct *= scale;
  r.within3_pct *= scale;
  return r;
}

EvalReport evaluate_durations(DurationPredictor& model,
                              const std::vector<DurationItem>& items) {
  NoGradGuard no_grad;
  Rng dummy(0);
  std::vector<int64_t> pred, ref;
  for (const DurationItem& it : items) {
    const Tensor out = predict_durations(model, it.tokens, Mode::Eval, dummy);
    const std::vector<int64_t> d =
        decode_durations(out, model.head_kind, it.tokens);
    pred.insert(pred.end(), d.begin(), d.end());
    ref.insert(ref.end(), it.durations.begin(), it.durations.end());
  }
  return duration_metrics(pred, ref);
}

std::string format_eval(const EvalReport& r) {
  std::ostringstream out;
  out << "mse\taccuracy_pct\twithin1_pct\twithin3_pct\n";
  out << r.mse << '\t' << r.accuracy_pct << '\t' << r.within1_pct << '\t'
      << r.within3_pct << '\n';
  return out.str();
}

double mel_eval_mse(MelGenerator& model, const std::vector<MelItem>& items) {
  NoGradGuard no_grad;
  Rng dummy(0);
  double sq = 0.0;
  int64_t count = 0;
  for (const MelItem& it : items) {
    const Tensor expanded =
        embed_expanded(it.tokens, it.durations, model.embedding);
    const Tensor out = mel_forward(model, expanded, Mode::Eval, dummy);
    std::span<const double> v = out.values();
    for (int64_t t = 0; t < it.target.frames; ++t)
      for (int c = 0; c < it.target.n_mels; ++c) {
        const double e =
            v[static_cast<size_t>(c) * it.target.frames + t] - it.target.at(t, c);
        sq += e * e;
      }
    count += it.target.frames * it.target.n_mels;
  }
  if (count == 0) throw InvalidArgument("no frames to evaluate");
  return sq / static_cast<double>(count);
}

SynthesisResult synthesize(const std::string& text, DurationPredictor& dur,
                           MelGenerator& mel, const MelConfig& cfg,
                           double speed, int griffin_lim_iters,
                           uint64_t seed) {
  if (!(*dur.vocab == *mel.vocab))
    throw InvalidArgument("the two models use different vocabularies");
  NoGradGuard no_grad;
  SynthesisResult r;
  r.tokens = insert_blanks(tokenize(text, dur.vocab));
  Rng dummy(0);
  const Tensor head = predict_durations(dur, r.tokens, Mode::Eval, dummy);
  r.durations = decode_durations(head, dur.head_kind, r.tokens, speed);
  const Tensor expanded =
      embed_expanded(r.tokens, r.durations, mel.embedding);
  r.mel = generate_mel(mel, expanded, cfg);
  Rng gl_rng(seed);
  r.audio = griffin_lim(r.mel, griffin_lim_iters, gl_rng);
  return r;
}

LatencyReport benchmark_latency(MelGenerator& model,
                                std::vector<int64_t> lengths, int repeats,
                                uint64_t seed) {
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  NoGradGuard no_grad;
  Rng rng(seed);
  Rng dummy(0);
  LatencyReport report;
  for (int64_t L : lengths) {
    if (L < 1) throw InvalidArgument("benchmark length must be >= 1");
    std::vector<double> data(static_cast<size_t>(model.embed_dim) * L);
    for (double& v : data) v = rng.normal();
    const Tensor input =
        Tensor::from_data({model.embed_dim, L}, std::move(data));
    mel_forward(model, input, Mode::Eval, dummy);  // warmup
    std::vector<double> times(repeats);
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      mel_forward(model, input, Mode::Eval, dummy);
      const auto t1 = std::chrono::steady_clock::now();
      times[r] = std::chrono::duration<double>(t1 - t0).count();
    }
    std::sort(times.begin(), times.end());
    const double med = times[times.size() / 2];
    report.points.push_back(
        {L, med, static_cast<double>(L) / std::max(med, 1e-12)});
  }

  if (report.points.size() < 2) {
    report.scaling_exponent = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(report.points.size());
  for (const LatencyPoint& p : report.points) {
    const double x = std::log(static_cast<double>(p.length));
    const double y = std::log(std::max(p.seconds, 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.scaling_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return report;
}

}  // namespace tnet
