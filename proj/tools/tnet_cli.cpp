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

// Command-line front end. Subcommands cover the whole pipeline: corpus
// generation, duration extraction, the two training runs, synthesis and
// the latency benchmark. Logs go to stderr; artifacts go to files.
// Exit codes: 0 on success (extract-durations: at least one utterance
// extracted), 1 on any error or empty result.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnet/checkpoint.hpp"
#include "tnet/config.hpp"
#include "tnet/ctc_align.hpp"
#include "tnet/error.hpp"
#include "tnet/manifest.hpp"
#include "tnet/synth_corpus.hpp"
#include "tnet/train.hpp"
#include "tnet/wav_io.hpp"

namespace fs = std::filesystem;
using namespace tnet;

namespace {

std::string strip_wav_suffix(std::string stem) {
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".wav")
    stem.resize(stem.size() - 4);
  return stem;
}

void log(const std::string& msg) { std::cerr << "[tnet] " << msg << "\n"; }

void write_text(const std::string& path, const std::string& text,
                bool append = false) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

std::string loss_log_text(const std::vector<TrainLogEntry>& entries) {
  std::ostringstream out;
  for (const TrainLogEntry& e : entries)
    out << e.epoch << '\t' << e.step << '\t' << e.loss << '\t' << e.lr
        << '\n';
  return out.str();
}

std::vector<DurationItem> load_duration_items(
    const std::string& manifest_path, const std::string& dur_dir,
    std::shared_ptr<const Vocabulary> vocab) {
  std::vector<DurationItem> items;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    const std::string stem = strip_wav_suffix(e.stem);
    const fs::path path = fs::path(dur_dir) / (stem + ".dur");
    if (!fs::exists(path))
      throw Error("missing duration file " + path.string() +
                  "; run extract-durations first");
    items.push_back(
        make_duration_item(stem, read_durations(path.string()), vocab));
  }
  return items;
}

std::vector<MelItem> load_mel_items(const std::string& manifest_path,
                                    const std::string& dur_dir,
                                    const std::string& wav_dir,
                                    const MelConfig& cfg,
                                    std::shared_ptr<const Vocabulary> vocab) {
  std::vector<MelItem> items;
  int64_t rejected = 0;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    const std::string stem = strip_wav_suffix(e.stem);
    const fs::path dpath = fs::path(dur_dir) / (stem + ".dur");
    if (!fs::exists(dpath))
      throw Error("missing duration file " + dpath.string() +
                  "; run extract-durations first");
    const fs::path wpath = fs::path(wav_dir) / (stem + ".wav");
    if (!fs::exists(wpath))
      throw Error("missing audio file " + wpath.string());
    const DurationMap d = read_durations(dpath.string());
    const MelSpectrogram mel = mel_spectrogram(read_wav(wpath.string()), cfg);
    try {
      items.push_back(make_mel_item(stem, d, mel, vocab));
    } catch (const InvalidArgument& err) {
      ++rejected;
      log("rejected " + stem + ": " + err.what());
    }
  }
  if (rejected > 0)
    log("rejected " + std::to_string(rejected) + " utterance(s)");
  return items;
}

// Flags override values read from --config.
struct TrainArgs {
  std::string manifest, dur_dir, wav_dir, out, config_path, resume;
  std::string loss_log, eval_out, head;
  int64_t epochs = -1;
  int64_t checkpoint_every = 0;
  uint64_t seed = 0;
  bool seed_set = false;
};

PipelineConfig load_pipeline(const std::string& config_path) {
  if (config_path.empty()) return PipelineConfig{};
  return pipeline_from_config(parse_config_file(config_path));
}

int cmd_make_corpus(const std::string& out_dir, int count, uint64_t seed) {
  const MelConfig cfg = synth_default_mel_config();
  fs::create_directories(fs::path(out_dir) / "wavs");
  fs::create_directories(fs::path(out_dir) / "ctc");
  const Rng rng(seed);
  const std::vector<SynthUtterance> corpus = synth_corpus(count, rng, cfg);
  std::ostringstream manifest;
  for (const SynthUtterance& u : corpus) {
    write_wav((fs::path(out_dir) / "wavs" / (u.name + ".wav")).string(),
              u.audio);
    write_ctc_matrix(
        (fs::path(out_dir) / "ctc" / (u.name + ".ctcm")).string(),
        oracle_ctc_matrix(u.oracle));
    manifest << u.name << '|' << u.transcript << '\n';
  }
  write_text((fs::path(out_dir) / "metadata.csv").string(), manifest.str());
  log("wrote " + std::to_string(corpus.size()) + " utterances to " + out_dir);
  return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& ctc_dir,
                const std::string& out_dir) {
  fs::create_directories(out_dir);
  int64_t ok = 0, rejected = 0;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    const std::string stem = strip_wav_suffix(e.stem);
    const fs::path mpath = fs::path(ctc_dir) / (stem + ".ctcm");
    try {
      const CtcMatrix m = read_ctc_matrix(mpath.string());
      const DurationMap d = extract_durations(m, e.transcript);
      write_durations((fs::path(out_dir) / (stem + ".dur")).string(), d);
      ++ok;
    } catch (const std::exception& err) {
      ++rejected;
      log("skipping " + stem + ": " + err.what());
    }
  }
  log("extracted " + std::to_string(ok) + ", rejected " +
      std::to_string(rejected));
  return ok >= 1 ? 0 : 1;
}

template <typename Trainer>
int run_training(Trainer& trainer, const TrainArgs& a, bool resumed) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string loss_path =
      a.loss_log.empty() ? a.out + ".loss.tsv" : a.loss_log;
  std::vector<TrainLogEntry> entries = trainer.run([&](int64_t epoch,
                                                       double mean_loss) {
    log("epoch " + std::to_string(epoch) + " loss " +
        std::to_string(mean_loss));
    if (a.checkpoint_every > 0 && epoch % a.checkpoint_every == 0)
      save_checkpoint(a.out + ".epoch" + std::to_string(epoch),
                      trainer.snapshot());
  });
  save_checkpoint(a.out, trainer.snapshot());
  write_text(loss_path, loss_log_text(entries), /*append=*/resumed);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  log("finished in " + std::to_string(secs) + " s; checkpoint " + a.out);
  return 0;
}

int cmd_train_duration(const TrainArgs& a, uint64_t global_seed,
                       bool global_seed_set) {
  PipelineConfig p = load_pipeline(a.config_path);
  TrainConfig cfg = p.duration_train;
  if (a.epochs >= 0) cfg.epochs = a.epochs;
  if (a.seed_set)
    cfg.seed = a.seed;
  else if (global_seed_set)
    cfg.seed = global_seed;
  const std::string head = a.head.empty() ? p.head : a.head;
  if (head != "l2" && head != "xe")
    throw InvalidArgument("--head must be 'l2' or 'xe'");
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be >= 1");

  const auto vocab = Vocabulary::standard();
  std::vector<DurationItem> items =
      load_duration_items(a.manifest, a.dur_dir, vocab);
  log("training duration predictor on " + std::to_string(items.size()) +
      " utterances, head " + head);

  DurationPredictor model = [&] {
    if (!a.resume.empty()) {
      const Checkpoint ck = load_checkpoint(a.resume);
      return duration_predictor_from(ck);
    }
    Rng init(cfg.seed);
    return build_duration_predictor(
        head == "xe" ? DurationHead::XE : DurationHead::L2, vocab, init);
  }();

  DurationTrainer trainer(model, items, cfg);
  bool resumed = false;
  if (!a.resume.empty()) {
    trainer.resume_from(load_checkpoint(a.resume));
    resumed = true;
    log("resuming from " + a.resume);
  }
  const int rc = run_training(trainer, a, resumed);

  const EvalReport report = evaluate_durations(model, items);
  log("eval: mse " + std::to_string(report.mse) + ", exact " +
      std::to_string(report.accuracy_pct) + "%, within1 " +
      std::to_string(report.within1_pct) + "%, within3 " +
      std::to_string(report.within3_pct) + "%");
  if (!a.eval_out.empty()) write_text(a.eval_out, format_eval(report));
  return rc;
}

int cmd_train_mel(const TrainArgs& a, uint64_t global_seed,
                  bool global_seed_set) {
  PipelineConfig p = load_pipeline(a.config_path);
  TrainConfig cfg = p.mel_train;
  if (a.epochs >= 0) cfg.epochs = a.epochs;
  if (a.seed_set)
    cfg.seed = a.seed;
  else if (global_seed_set)
    cfg.seed = global_seed;
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be >= 1");

  const auto vocab = Vocabulary::standard();
  std::vector<MelItem> items =
      load_mel_items(a.manifest, a.dur_dir, a.wav_dir, p.mel, vocab);
  if (items.empty()) throw Error("no usable utterances in the corpus");
  log("training mel generator on " + std::to_string(items.size()) +
      " utterances");

  MelGenerator model = [&] {
    if (!a.resume.empty()) {
      const Checkpoint ck = load_checkpoint(a.resume);
      return mel_generator_from(ck);
    }
    Rng init(cfg.seed);
    return build_mel_generator(vocab, init, 256, p.mel.n_mels);
  }();

  MelTrainer trainer(model, items, cfg);
  bool resumed = false;
  if (!a.resume.empty()) {
    trainer.resume_from(load_checkpoint(a.resume));
    resumed = true;
    log("resuming from " + a.resume);
  }
  const int rc = run_training(trainer, a, resumed);

  const double mse = mel_eval_mse(model, items);
  log("eval: mel mse " + std::to_string(mse));
  if (!a.eval_out.empty())
    write_text(a.eval_out, "mel_mse\n" + std::to_string(mse) + "\n");
  return rc;
}

int cmd_synthesize(const std::string& text, const std::string& text_file,
                   const std::string& dur_ckpt, const std::string& mel_ckpt,
                   const std::string& out, double speed, int gl_iters,
                   uint64_t seed) {
  DurationPredictor dur = duration_predictor_from(load_checkpoint(dur_ckpt));
  const Checkpoint mel_ck = load_checkpoint(mel_ckpt);
  MelGenerator mel = mel_generator_from(mel_ck);
  if (!(*dur.vocab == *mel.vocab))
    throw Error("checkpoint vocabularies do not match");
  const MelConfig cfg = mel_ck.mel;

  std::vector<std::string> lines;
  if (!text.empty()) {
    lines.push_back(text);
  } else {
    std::ifstream in(text_file);
    if (!in) throw IoError("cannot open " + text_file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw Error(text_file + " has no non-empty lines");
  }

  for (size_t i = 0; i < lines.size(); ++i) {
    const SynthesisResult r =
        synthesize(lines[i], dur, mel, cfg, speed, gl_iters, seed + i);
    std::string path = out;
    if (lines.size() > 1) {
      const fs::path p(out);
      path = (p.parent_path() /
              (p.stem().string() + "_" + std::to_string(i + 1) +
               p.extension().string()))
                 .string();
    }
    write_wav(path, r.audio);
    log("wrote " + path + " (" + std::to_string(r.mel.frames) + " frames, " +
        std::to_string(r.audio.duration_seconds()) + " s)");
  }
  return 0;
}

int cmd_benchmark(const std::string& mel_ckpt,
                  const std::vector<int64_t>& lengths, int repeats,
                  uint64_t seed) {
  MelGenerator mel = mel_generator_from(load_checkpoint(mel_ckpt));
  const LatencyReport report = benchmark_latency(mel, lengths, repeats, seed);
  std::ostringstream table;
  table << "length\tseconds\tframes_per_sec\n";
  for (const LatencyPoint& p : report.points)
    table << p.length << '\t' << p.seconds << '\t' << p.frames_per_sec
          << '\n';
  if (report.points.size() >= 2)
    table << "exponent\t" << report.scaling_exponent << '\n';
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TalkNet-style text-to-spectrogram pipeline"};
  app.require_subcommand(1);

  uint64_t seed = 1234;
  int precision = 32;
  auto* seed_opt =
      app.add_option("--seed", seed, "global random seed")
          ->capture_default_str();
  app.add_option("--precision", precision, "float width: 32 or 64")
      ->check(CLI::IsMember({32, 64}))
      ->capture_default_str();

  auto* mk = app.add_subcommand("make-synthetic-corpus",
                                "generate a deterministic tone corpus");
  std::string mk_out = "corpus";
  int mk_count = 16;
  mk->add_option("--out", mk_out, "output directory")->required();
  mk->add_option("--count", mk_count, "number of utterances")
      ->capture_default_str();

  auto* ex = app.add_subcommand("extract-durations",
                                "durations from CTC score matrices");
  std::string ex_manifest, ex_ctc, ex_out;
  ex->add_option("--manifest", ex_manifest, "stem|transcript file")
      ->required();
  ex->add_option("--ctc-dir", ex_ctc, "directory of .ctcm files")->required();
  ex->add_option("--out-dir", ex_out, "directory for .dur files")->required();

  TrainArgs td, tm;
  auto add_train_flags = [](CLI::App* cmd, TrainArgs& a, bool mel) {
    cmd->add_option("--manifest", a.manifest)->required();
    cmd->add_option("--dur-dir", a.dur_dir, "directory of .dur files")
        ->required();
    if (mel)
      cmd->add_option("--wav-dir", a.wav_dir, "directory of .wav files")
          ->required();
    cmd->add_option("--out", a.out, "checkpoint path")->required();
    cmd->add_option("--config", a.config_path, "key = value config file");
    cmd->add_option("--epochs", a.epochs);
    cmd->add_option("--checkpoint-every", a.checkpoint_every,
                    "also snapshot every K epochs");
    cmd->add_option("--resume", a.resume, "checkpoint to continue from");
    cmd->add_option("--loss-log", a.loss_log,
                    "per-step loss file (default <out>.loss.tsv)");
    cmd->add_option("--eval-out", a.eval_out, "write final metrics here");
    auto* s = cmd->add_option("--train-seed", a.seed, "seed for this run");
    s->each([&a](const std::string&) { a.seed_set = true; });
  };
  auto* tdc = app.add_subcommand("train-duration",
                                 "train the duration predictor");
  add_train_flags(tdc, td, false);
  tdc->add_option("--head", td.head, "l2 or xe (default from config, else l2)");
  auto* tmc = app.add_subcommand("train-mel", "train the mel generator");
  add_train_flags(tmc, tm, true);

  auto* sy = app.add_subcommand("synthesize", "text to WAV");
  std::string sy_text, sy_file, sy_dur, sy_mel, sy_out = "out.wav";
  double sy_speed = 1.0;
  int sy_iters = 60;
  sy->add_option("--text", sy_text, "input text");
  sy->add_option("--text-file", sy_file, "one utterance per line");
  sy->add_option("--dur-ckpt", sy_dur)->required();
  sy->add_option("--mel-ckpt", sy_mel)->required();
  sy->add_option("--out", sy_out, "output WAV path")->capture_default_str();
  sy->add_option("--speed", sy_speed, "rate multiplier")
      ->capture_default_str();
  sy->add_option("--griffin-lim-iters", sy_iters)->capture_default_str();

  auto* be = app.add_subcommand("benchmark", "mel generator latency table");
  std::string be_mel;
  std::vector<int64_t> be_lengths = {128, 256, 512, 1024, 2048};
  int be_repeats = 5;
  be->add_option("--mel-ckpt", be_mel)->required();
  be->add_option("--lengths", be_lengths, "input lengths to time")
      ->delimiter(',')
      ->capture_default_str();
  be->add_option("--repeats", be_repeats)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  set_precision(precision == 64 ? Precision::F64 : Precision::F32);

  try {
    if (mk->parsed()) return cmd_make_corpus(mk_out, mk_count, seed);
    if (ex->parsed()) return cmd_extract(ex_manifest, ex_ctc, ex_out);
    if (tdc->parsed())
      return cmd_train_duration(td, seed, seed_opt->count() > 0);
    if (tmc->parsed()) return cmd_train_mel(tm, seed, seed_opt->count() > 0);
    if (sy->parsed()) {
      if (sy_text.empty() == sy_file.empty())
        throw InvalidArgument("give exactly one of --text or --text-file");
      return cmd_synthesize(sy_text, sy_file, sy_dur, sy_mel, sy_out,
                            sy_speed, sy_iters, seed);
    }
    if (be->parsed())
      return cmd_benchmark(be_mel, be_lengths, be_repeats, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
