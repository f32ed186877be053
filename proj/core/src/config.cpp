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

#include "tnet/config.hpp"

#include <fstream>
#include <sstream>

#include "tnet/error.hpp"

namespace tnet {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("[" + section + "] " + key + " = '" + value +
                          "' is not a number");
  }
}

int64_t to_int(const std::string& section, const std::string& key,
               const std::string& value) {
  try {
    size_t used = 0;
    const int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("[" + section + "] " + key + " = '" + value +
                          "' is not an integer");
  }
}

uint64_t to_uint(const std::string& section, const std::string& key,
                 const std::string& value) {
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("[" + section + "] " + key + " = '" + value +
                          "' is not an unsigned integer");
  }
}

void apply_audio(const std::string& section,
                 const std::map<std::string, std::string>& kv, MelConfig& m) {
  for (const auto& [key, value] : kv) {
    if (key == "sample_rate")
      m.sample_rate = static_cast<int>(to_int(section, key, value));
    else if (key == "window_ms")
      m.window_ms = to_double(section, key, value);
    else if (key == "hop_ms")
      m.hop_ms = to_double(section, key, value);
    else if (key == "n_mels")
      m.n_mels = static_cast<int>(to_int(section, key, value));
    else if (key == "fft_size")
      m.fft_size = static_cast<int>(to_int(section, key, value));
    else if (key == "fmin")
      m.fmin = to_double(section, key, value);
    else if (key == "fmax")
      m.fmax = to_double(section, key, value);
    else if (key == "log_floor")
      m.log_floor = to_double(section, key, value);
    else
      throw InvalidArgument("unknown key '" + key + "' in section [" +
                            section + "]");
  }
}

void apply_train(const std::string& section,
                 const std::map<std::string, std::string>& kv,
                 TrainConfig& t) {
  for (const auto& [key, value] : kv) {
    if (key == "epochs")
      t.epochs = to_int(section, key, value);
    else if (key == "batch_size")
      t.batch_size = to_int(section, key, value);
    else if (key == "lr_max")
      t.schedule.lr_max = to_double(section, key, value);
    else if (key == "lr_min")
      t.schedule.lr_min = to_double(section, key, value);
    else if (key == "warmup_fraction")
      t.schedule.warmup_fraction = to_double(section, key, value);
    else if (key == "total_steps")
      t.schedule.total_steps = to_int(section, key, value);
    else if (key == "beta1")
      t.beta1 = to_double(section, key, value);
    else if (key == "beta2")
      t.beta2 = to_double(section, key, value);
    else if (key == "adam_eps")
      t.adam_eps = to_double(section, key, value);
    else if (key == "weight_decay")
      t.weight_decay = to_double(section, key, value);
    else if (key == "clip_norm")
      t.clip_norm = to_double(section, key, value);
    else if (key == "p_augment")
      t.p_augment = to_double(section, key, value);
    else if (key == "augment_strength")
      t.augment_strength = to_double(section, key, value);
    else if (key == "seed")
      t.seed = to_uint(section, key, value);
    else
      throw InvalidArgument("unknown key '" + key + "' in section [" +
                            section + "]");
  }
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line, section;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw IoError("line " + std::to_string(lineno) +
                      ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("line " + std::to_string(lineno) +
                    ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw IoError("line " + std::to_string(lineno) + ": empty key");
    cfg[section][key] = value;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

PipelineConfig pipeline_from_config(const ConfigMap& cfg) {
  PipelineConfig p;
  for (const auto& [section, kv] : cfg) {
    if (section == "audio") {
      apply_audio(section, kv, p.mel);
    } else if (section == "train.duration") {
      apply_train(section, kv, p.duration_train);
    } else if (section == "train.mel") {
      apply_train(section, kv, p.mel_train);
    } else if (section == "synthesize") {
      for (const auto& [key, value] : kv) {
        if (key == "griffin_lim_iters")
          p.griffin_lim_iters =
              static_cast<int>(to_int(section, key, value));
        else if (key == "speed")
          p.speed = to_double(section, key, value);
        else
          throw InvalidArgument("unknown key '" + key + "' in section [" +
                                section + "]");
      }
    } else if (section == "pipeline" || section.empty()) {
      for (const auto& [key, value] : kv) {
        if (key == "head") {
          if (value != "l2" && value != "xe")
            throw InvalidArgument("[pipeline] head must be 'l2' or 'xe', "
                                  "got '" + value + "'");
          p.head = value;
        } else if (key == "seed") {
          p.seed = to_uint(section, key, value);
        } else {
          throw InvalidArgument("unknown key '" + key + "' in section [" +
                                section + "]");
        }
      }
    } else {
      throw InvalidArgument("unknown config section [" + section + "]");
    }
  }
  return p;
}

}  // namespace tnet
