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

#include "tnet/textproc.hpp"

#include <algorithm>

#include "tnet/error.hpp"

namespace tnet {

std::vector<char32_t> utf8_decode(const std::string& s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    int extra;
    char32_t cp;
    if (c < 0x80) {
      extra = 0;
      cp = c;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      throw InvalidArgument("invalid UTF-8 byte at offset " +
                            std::to_string(i));
    }
    if (i + extra >= s.size())
      throw InvalidArgument("truncated UTF-8 sequence at offset " +
                            std::to_string(i));
    for (int k = 1; k <= extra; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80)
        throw InvalidArgument("invalid UTF-8 continuation at offset " +
                              std::to_string(i + k));
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xc0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3f));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xe0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (c & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (c & 0x3f));
  }
  return out;
}

std::string utf8_encode(const std::vector<char32_t>& chars) {
  std::string out;
  for (char32_t c : chars) out += utf8_encode(c);
  return out;
}

Vocabulary::Vocabulary(std::vector<char32_t> symbols)
    : symbols_(std::move(symbols)) {
  for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
    if (!index_.emplace(symbols_[i], i).second)
      throw InvalidArgument("duplicate vocabulary symbol '" +
                            utf8_encode(symbols_[i]) + "'");
  }
  const auto blank = index_.find(kBlankChar);
  const auto unknown = index_.find(kUnknownChar);
  if (blank == index_.end() || unknown == index_.end())
    throw InvalidArgument("vocabulary must contain blank and unknown symbols");
  blank_id_ = blank->second;
  unknown_id_ = unknown->second;
}

std::shared_ptr<const Vocabulary> Vocabulary::standard() {
  static const std::shared_ptr<const Vocabulary> instance = [] {
    std::vector<char32_t> syms = {kBlankChar, kUnknownChar, U' '};
    for (char32_t c = U'a'; c <= U'z'; ++c) syms.push_back(c);
    for (char32_t c = U'0'; c <= U'9'; ++c) syms.push_back(c);
    for (char32_t c : {U'!', U'"', U'\'', U'(', U')', U',', U'-', U'.',
                       U':', U';', U'?'})
      syms.push_back(c);
    return std::shared_ptr<const Vocabulary>(new Vocabulary(std::move(syms)));
  }();
  return instance;
}

std::shared_ptr<const Vocabulary> Vocabulary::from_symbols(
    std::vector<char32_t> symbols) {
  return std::shared_ptr<const Vocabulary>(
      new Vocabulary(std::move(symbols)));
}

char32_t Vocabulary::symbol(int id) const {
  if (id < 0 || id >= size())
    throw InvalidArgument("vocabulary id " + std::to_string(id) +
                          " out of range [0, " + std::to_string(size()) + ")");
  return symbols_[id];
}

int Vocabulary::id_of(char32_t c) const {
  const auto it = index_.find(c);
  return it == index_.end() ? unknown_id_ : it->second;
}

bool Vocabulary::contains(char32_t c) const { return index_.count(c) > 0; }

std::vector<char32_t> normalize_text(const std::string& utf8_text) {
  const std::vector<char32_t> raw = utf8_decode(utf8_text);
  std::vector<char32_t> out;
  out.reserve(raw.size());
  for (char32_t c : raw) {
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    const bool ws = c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
                    c == U'\f' || c == U'\v';
    if (ws) {
      if (!out.empty() && out.back() != U' ') out.push_back(U' ');
      continue;
    }
    out.push_back(c);
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return out;
}

std::vector<char32_t> Vocabulary::normalize(
    const std::string& utf8_text) const {
  std::vector<char32_t> out = normalize_text(utf8_text);
  for (char32_t& c : out)
    if (!contains(c) || c == kBlankChar) c = kUnknownChar;
  return out;
}

TokenSequence tokenize(const std::string& utf8_text,
                       std::shared_ptr<const Vocabulary> vocab) {
  if (!vocab) throw InvalidArgument("tokenize: null vocabulary");
  const std::vector<char32_t> chars = vocab->normalize(utf8_text);
  if (chars.empty())
    throw InvalidArgument("text is empty after normalization");
  TokenSequence t;
  t.vocab = std::move(vocab);
  t.ids.reserve(chars.size());
  for (char32_t c : chars) t.ids.push_back(t.vocab->id_of(c));
  return t;
}

TokenSequence insert_blanks(const TokenSequence& t) {
  if (t.has_blanks)
    throw InvalidArgument("sequence already has blanks inserted");
  if (t.ids.empty()) throw InvalidArgument("cannot blank an empty sequence");
  TokenSequence out;
  out.vocab = t.vocab;
  out.has_blanks = true;
  const int blank = t.vocab->blank_id();
  out.ids.reserve(2 * t.ids.size() + 1);
  out.ids.push_back(blank);
  for (int id : t.ids) {
    out.ids.push_back(id);
    out.ids.push_back(blank);
  }
  return out;
}

TokenSequence expand(const TokenSequence& t,
                     std::span<const int64_t> durations) {
  if (durations.size() != t.ids.size())
    throw InvalidArgument("expand: " + std::to_string(t.ids.size()) +
                          " tokens but " + std::to_string(durations.size()) +
                          " durations");
  TokenSequence out;
  out.vocab = t.vocab;
  int64_t total = 0;
  for (size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] < 0)
      throw InvalidArgument("negative duration at position " +
                            std::to_string(i));
    total += durations[i];
  }
  out.ids.reserve(total);
  for (size_t i = 0; i < durations.size(); ++i)
    for (int64_t k = 0; k < durations[i]; ++k) out.ids.push_back(t.ids[i]);
  return out;
}

std::pair<double, double> blank_weights(int64_t d, int64_t t) {
  if (d < 1 || t < 1 || t > d)
    throw InvalidArgument("blank_weights: need 1 <= t <= d");
  const double denom = static_cast<double>(d + 1);
  return {(d + 1 - t) / denom, t / denom};
}

Tensor embed_expanded(const TokenSequence& t_blanked,
                      std::span<const int64_t> durations,
                      const Tensor& table) {
  if (!t_blanked.has_blanks)
    throw InvalidArgument("embed_expanded expects a blank-interleaved "
                          "sequence");
  if (durations.size() != t_blanked.ids.size())
    throw InvalidArgument("embed_expanded: " +
                          std::to_string(t_blanked.ids.size()) +
                          " tokens but " + std::to_string(durations.size()) +
                          " durations");
  if (table.rank() != 2)
    throw InvalidArgument("embedding table must be [V x D]");
  const int64_t V = table.dim(0);
  const int64_t D = table.dim(1);
  const int blank = t_blanked.vocab->blank_id();
  const auto& ids = t_blanked.ids;
  const int64_t n = static_cast<int64_t>(ids.size());

  // One (row, row, weight, weight) recipe per output column. Character
  // columns use a single row with weight 1; interior blank columns blend
  // the two neighboring character rows.
  struct ColumnMix {
    int row_a = -1;
    int row_b = -1;  // -1 = unused
    double w_a = 0.0;
    double w_b = 0.0;
  };
  std::vector<ColumnMix> cols;
  for (int64_t i = 0; i < n; ++i) {
    if (durations[i] < 0)
      throw InvalidArgument("negative duration at position " +
                            std::to_string(i));
    if (ids[i] < 0 || ids[i] >= V)
      throw InvalidArgument("token id " + std::to_string(ids[i]) +
                            " outside table rows [0, " + std::to_string(V) +
                            ")");
    if (ids[i] != blank) {
      for (int64_t t = 0; t < durations[i]; ++t)
        cols.push_back({ids[i], -1, 1.0, 0.0});
      continue;
    }
    const int left = i > 0 ? ids[i - 1] : -1;
    const int right = i + 1 < n ? ids[i + 1] : -1;
    for (int64_t t = 1; t <= durations[i]; ++t) {
      if (left >= 0 && right >= 0) {
        const auto [wl, wr] = blank_weights(durations[i], t);
        cols.push_back({left, right, wl, wr});
      } else if (left >= 0) {
        cols.push_back({left, -1, 1.0, 0.0});
      } else if (right >= 0) {
        cols.push_back({right, -1, 1.0, 0.0});
      } else {
        throw InvalidArgument("blank token with no character neighbor");
      }
    }
  }

  const int64_t L = static_cast<int64_t>(cols.size());
  std::vector<double> value(static_cast<size_t>(D) * L, 0.0);
  std::span<const double> tab = table.values();
  for (int64_t c = 0; c < L; ++c) {
    const ColumnMix& m = cols[c];
    const double* ra = tab.data() + static_cast<size_t>(m.row_a) * D;
    if (m.row_b < 0) {
      for (int64_t d = 0; d < D; ++d) value[d * L + c] = m.w_a * ra[d];
    } else {
      const double* rb = tab.data() + static_cast<size_t>(m.row_b) * D;
      for (int64_t d = 0; d < D; ++d)
        value[d * L + c] = m.w_a * ra[d] + m.w_b * rb[d];
    }
  }

  Tensor table_in = table;
  return detail::make_result(
      {D, L}, std::move(value), {table},
      [cols = std::move(cols), table_in, D, L](detail::TensorImpl& self) {
        auto timpl = table_in.impl();
        if (!timpl->requires_grad) return;
        timpl->ensure_grad();
        for (int64_t c = 0; c < L; ++c) {
          const ColumnMix& m = cols[c];
          double* ga = timpl->grad.data() + static_cast<size_t>(m.row_a) * D;
          if (m.row_b < 0) {
            for (int64_t d = 0; d < D; ++d)
              ga[d] += m.w_a * self.grad[d * L + c];
          } else {
            double* gb = timpl->grad.data() + static_cast<size_t>(m.row_b) * D;
            for (int64_t d = 0; d < D; ++d) {
              const double g = self.grad[d * L + c];
              ga[d] += m.w_a * g;
              gb[d] += m.w_b * g;
            }
          }
        }
      });
}

}  // namespace tnet
