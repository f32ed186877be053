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

#include "tnet/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tnet/error.hpp"

namespace tnet {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'T', 'N', 'E', 'T'};

void write_u32le(std::ostream& out, uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("checkpoint truncated");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

json mel_to_json(const MelConfig& m) {
  return json{{"sample_rate", m.sample_rate}, {"window_ms", m.window_ms},
              {"hop_ms", m.hop_ms},           {"n_mels", m.n_mels},
              {"fft_size", m.fft_size},       {"fmin", m.fmin},
              {"fmax", m.fmax},               {"log_floor", m.log_floor}};
}

MelConfig mel_from_json(const json& j) {
  MelConfig m;
  m.sample_rate = j.at("sample_rate").get<int>();
  m.window_ms = j.at("window_ms").get<double>();
  m.hop_ms = j.at("hop_ms").get<double>();
  m.n_mels = j.at("n_mels").get<int>();
  m.fft_size = j.at("fft_size").get<int>();
  m.fmin = j.at("fmin").get<double>();
  m.fmax = j.at("fmax").get<double>();
  m.log_floor = j.at("log_floor").get<double>();
  return m;
}

std::string metadata_json(const Checkpoint& ck) {
  json j;
  j["version"] = ck.version;
  j["kind"] = ck.kind;
  j["head"] = ck.head;
  j["embed_dim"] = ck.embed_dim;
  j["n_mels"] = ck.n_mels;
  json blocks = json::array();
  for (const BlockSpec& b : ck.blocks)
    blocks.push_back(json{{"sub_blocks", b.sub_blocks},
                          {"channels", b.channels},
                          {"kernel", b.kernel},
                          {"dropout", b.dropout},
                          {"residual", b.residual}});
  j["blocks"] = std::move(blocks);
  j["vocabulary"] = utf8_encode(ck.vocabulary);
  j["mel_config"] = mel_to_json(ck.mel);
  j["seed"] = ck.seed;
  if (ck.train.present) {
    j["train"] = json{{"epoch", ck.train.epoch},
                      {"global_step", ck.train.global_step},
                      {"adam_t", ck.train.adam_t},
                      {"rng_state", ck.train.rng_state},
                      {"lr_max", ck.train.schedule.lr_max},
                      {"lr_min", ck.train.schedule.lr_min},
                      {"warmup_fraction", ck.train.schedule.warmup_fraction},
                      {"total_steps", ck.train.schedule.total_steps}};
  }
  return j.dump();
}

void metadata_parse(const std::string& text, Checkpoint& ck) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint metadata is not valid JSON: ") +
                  e.what());
  }
  try {
    ck.version = j.at("version").get<uint32_t>();
    ck.kind = j.at("kind").get<std::string>();
    ck.head = j.at("head").get<std::string>();
    ck.embed_dim = j.at("embed_dim").get<int>();
    ck.n_mels = j.at("n_mels").get<int>();
    ck.blocks.clear();
    for (const json& b : j.at("blocks")) {
      BlockSpec spec;
      spec.sub_blocks = b.at("sub_blocks").get<int>();
      spec.channels = b.at("channels").get<int>();
      spec.kernel = b.at("kernel").get<int>();
      spec.dropout = b.at("dropout").get<double>();
      spec.residual = b.at("residual").get<bool>();
      ck.blocks.push_back(spec);
    }
    ck.vocabulary = utf8_decode(j.at("vocabulary").get<std::string>());
    ck.mel = mel_from_json(j.at("mel_config"));
    ck.seed = j.at("seed").get<uint64_t>();
    ck.train = TrainResumeState{};
    if (j.contains("train")) {
      const json& t = j.at("train");
      ck.train.present = true;
      ck.train.epoch = t.at("epoch").get<int64_t>();
      ck.train.global_step = t.at("global_step").get<int64_t>();
      ck.train.adam_t = t.at("adam_t").get<int64_t>();
      const auto st = t.at("rng_state").get<std::vector<uint64_t>>();
      if (st.size() != 4) throw IoError("rng state must have 4 words");
      std::copy(st.begin(), st.end(), ck.train.rng_state.begin());
      ck.train.schedule.lr_max = t.at("lr_max").get<double>();
      ck.train.schedule.lr_min = t.at("lr_min").get<double>();
      ck.train.schedule.warmup_fraction =
          t.at("warmup_fraction").get<double>();
      ck.train.schedule.total_steps = t.at("total_steps").get<int64_t>();
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint metadata is incomplete: ") +
                  e.what());
  }
}

Tensor buffer_tensor(const std::vector<double>& v) {
  return Tensor::from_data({static_cast<int64_t>(v.size())},
                           std::vector<double>(v.begin(), v.end()));
}

void model_tensors(std::vector<NamedParam> params,
                   std::vector<NamedBuffer> buffers, Checkpoint& ck) {
  for (auto& p : params) {
    // Detach by value: the image must stay frozen while training continues
    // to mutate the live parameter storage.
    auto v = p.tensor.values();
    ck.tensors.emplace_back(
        std::move(p.name),
        Tensor::from_data(p.tensor.shape(),
                          std::vector<double>(v.begin(), v.end())));
  }
  for (auto& b : buffers)
    ck.tensors.emplace_back(std::move(b.name), buffer_tensor(*b.data));
}

void load_into(const Checkpoint& ck, std::vector<NamedParam> params,
               std::vector<NamedBuffer> buffers) {
  size_t used = 0;
  for (auto& p : params) {
    const Tensor* src = ck.find(p.name);
    if (!src) throw IoError("checkpoint is missing tensor " + p.name);
    if (src->shape() != p.tensor.shape())
      throw IoError("checkpoint tensor " + p.name + " has the wrong shape");
    std::copy(src->values().begin(), src->values().end(),
              p.tensor.values().begin());
    ++used;
  }
  for (auto& b : buffers) {
    const Tensor* src = ck.find(b.name);
    if (!src) throw IoError("checkpoint is missing tensor " + b.name);
    if (src->numel() != static_cast<int64_t>(b.data->size()))
      throw IoError("checkpoint tensor " + b.name + " has the wrong length");
    std::copy(src->values().begin(), src->values().end(), b.data->begin());
    ++used;
  }
  size_t opt = 0;
  for (const auto& [name, t] : ck.tensors)
    if (name.rfind("opt.", 0) == 0) ++opt;
  if (used + opt != ck.tensors.size())
    throw IoError("checkpoint carries tensors the model does not expect");
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_u32le(out, ck.version);
  const std::string meta = metadata_json(ck);
  write_u32le(out, static_cast<uint32_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_u32le(out, static_cast<uint32_t>(ck.tensors.size()));
  for (const auto& [name, t] : ck.tensors) {
    write_u32le(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32le(out, static_cast<uint32_t>(t.rank()));
    for (size_t i = 0; i < t.rank(); ++i)
      write_u32le(out, static_cast<uint32_t>(t.dim(i)));
    for (double v : t.values()) {
      const float f = static_cast<float>(v);
      char b[4];
      std::memcpy(b, &f, 4);
      out.write(b, 4);
    }
  }
  if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": bad magic, not a model checkpoint");
  Checkpoint ck;
  const uint32_t version = read_u32le(in);
  if (version != kCheckpointVersion)
    throw IoError(path + ": version mismatch detected, file has " +
                  std::to_string(version) + " but this build expects " +
                  std::to_string(kCheckpointVersion));
  const uint32_t meta_len = read_u32le(in);
  std::string meta(meta_len, '\0');
  in.read(meta.data(), meta_len);
  if (!in) throw IoError(path + ": truncated metadata");
  metadata_parse(meta, ck);
  if (ck.version != version)
    throw IoError(path + ": metadata version disagrees with the header");

  const uint32_t count = read_u32le(in);
  ck.tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_u32le(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const uint32_t rank = read_u32le(in);
    std::vector<int64_t> shape(rank);
    int64_t numel = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      shape[r] = read_u32le(in);
      numel *= shape[r];
    }
    std::vector<float> raw(static_cast<size_t>(numel));
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
    if (!in) throw IoError(path + ": truncated tensor " + name);
    std::vector<double> vals(raw.begin(), raw.end());
    ck.tensors.emplace_back(std::move(name),
                            Tensor::from_data(std::move(shape),
                                              std::move(vals)));
  }
  return ck;
}

Checkpoint checkpoint_from(DurationPredictor& m) {
  Checkpoint ck;
  ck.kind = "duration";
  ck.head = m.head_kind == DurationHead::XE ? "xe" : "l2";
  ck.embed_dim = m.embed_dim;
  ck.n_mels = 0;
  for (const ConvBlock& b : m.blocks) ck.blocks.push_back(b.spec);
  ck.vocabulary = m.vocab->symbols();
  model_tensors(m.parameters(), m.buffers(), ck);
  return ck;
}

Checkpoint checkpoint_from(MelGenerator& m) {
  Checkpoint ck;
  ck.kind = "mel";
  ck.head = "";
  ck.embed_dim = m.embed_dim;
  ck.n_mels = m.n_mels;
  for (const ConvBlock& b : m.blocks) ck.blocks.push_back(b.spec);
  ck.vocabulary = m.vocab->symbols();
  model_tensors(m.parameters(), m.buffers(), ck);
  return ck;
}

DurationPredictor duration_predictor_from(const Checkpoint& ck) {
  if (ck.kind != "duration")
    throw IoError("checkpoint kind '" + ck.kind +
                  "' is not a duration predictor");
  const DurationHead head =
      ck.head == "xe" ? DurationHead::XE : DurationHead::L2;
  Rng rng(0);  // placeholder weights, overwritten below
  DurationPredictor m = build_duration_predictor(
      head, Vocabulary::from_symbols(ck.vocabulary), rng, ck.embed_dim,
      ck.blocks);
  load_into(ck, m.parameters(), m.buffers());
  return m;
}

MelGenerator mel_generator_from(const Checkpoint& ck) {
  if (ck.kind != "mel")
    throw IoError("checkpoint kind '" + ck.kind + "' is not a mel generator");
  Rng rng(0);
  MelGenerator m =
      build_mel_generator(Vocabulary::from_symbols(ck.vocabulary), rng,
                          ck.embed_dim, ck.n_mels, ck.blocks);
  load_into(ck, m.parameters(), m.buffers());
  return m;
}

void append_optimizer_state(Checkpoint& ck, Adam& opt,
                            std::vector<NamedParam> params) {
  auto& m = opt.moments_m();
  auto& v = opt.moments_v();
  if (m.size() != params.size() || v.size() != params.size())
    throw InvalidArgument("optimizer state does not cover the parameters");
  for (size_t i = 0; i < params.size(); ++i) {
    ck.tensors.emplace_back("opt.m." + params[i].name, buffer_tensor(m[i]));
    ck.tensors.emplace_back("opt.v." + params[i].name, buffer_tensor(v[i]));
  }
  ck.train.adam_t = opt.t();
}

bool restore_optimizer_state(const Checkpoint& ck, Adam& opt,
                             std::vector<NamedParam> params) {
  auto& m = opt.moments_m();
  auto& v = opt.moments_v();
  m.assign(params.size(), {});
  v.assign(params.size(), {});
  for (size_t i = 0; i < params.size(); ++i) {
    const Tensor* tm = ck.find("opt.m." + params[i].name);
    const Tensor* tv = ck.find("opt.v." + params[i].name);
    if (!tm || !tv) return false;
    if (tm->numel() != params[i].tensor.numel() ||
        tv->numel() != params[i].tensor.numel())
      throw IoError("optimizer tensor for " + params[i].name +
                    " has the wrong length");
    m[i].assign(tm->values().begin(), tm->values().end());
    v[i].assign(tv->values().begin(), tv->values().end());
  }
  opt.set_t(ck.train.adam_t);
  return true;
}

}  // namespace tnet
