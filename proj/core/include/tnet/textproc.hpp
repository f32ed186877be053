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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tnet/tensor.hpp"

namespace tnet {

inline constexpr char32_t kBlankChar = U'~';
inline constexpr char32_t kUnknownChar = U'*';

std::vector<char32_t> utf8_decode(const std::string& s);
std::string utf8_encode(char32_t c);
std::string utf8_encode(const std::vector<char32_t>& chars);

/// Lowercases ASCII letters, collapses whitespace runs to a single space
/// and trims both ends. No symbol-set mapping.
std::vector<char32_t> normalize_text(const std::string& utf8_text);

/// Fixed symbol set with reserved blank (id 0) and unknown (id 1) entries.
class Vocabulary {
 public:
  /// Blank, unknown, space, a-z, 0-9, then !"'(),-.:;? in that order.
  static std::shared_ptr<const Vocabulary> standard();
  static std::shared_ptr<const Vocabulary> from_symbols(
      std::vector<char32_t> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  char32_t symbol(int id) const;
  int blank_id() const { return blank_id_; }
  int unknown_id() const { return unknown_id_; }
  /// Unknown id for symbols outside the set.
  int id_of(char32_t c) const;
  bool contains(char32_t c) const;
  const std::vector<char32_t>& symbols() const { return symbols_; }

  /// Lowercases ASCII, collapses whitespace runs to one space, trims the
  /// ends, and replaces symbols outside the set with the unknown marker.
  std::vector<char32_t> normalize(const std::string& utf8_text) const;

  bool operator==(const Vocabulary& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  explicit Vocabulary(std::vector<char32_t> symbols);
  std::vector<char32_t> symbols_;
  std::unordered_map<char32_t, int> index_;
  int blank_id_ = 0;
  int unknown_id_ = 0;
};

/// Token ids plus the vocabulary that produced them. has_blanks marks the
/// blank-interleaved layout [blank, c1, blank, ..., cN, blank].
struct TokenSequence {
  std::vector<int> ids;
  std::shared_ptr<const Vocabulary> vocab;
  bool has_blanks = false;

  int64_t size() const { return static_cast<int64_t>(ids.size()); }
};

/// Normalized character ids; empty normalized text is an error.
TokenSequence tokenize(const std::string& utf8_text,
                       std::shared_ptr<const Vocabulary> vocab);

/// [c1..cN] -> [blank, c1, blank, ..., cN, blank], length 2N + 1.
TokenSequence insert_blanks(const TokenSequence& t);

/// Repeats token i durations[i] times. Requires matching lengths and
/// nonnegative durations; zero-duration tokens vanish.
TokenSequence expand(const TokenSequence& t,
                     std::span<const int64_t> durations);

/// Weights for step t in 1..d of a blank of duration d between two
/// characters: ((d + 1 - t) / (d + 1), t / (d + 1)) for (left, right).
std::pair<double, double> blank_weights(int64_t d, int64_t t);

/// Embeds a blank-interleaved sequence expanded by durations to [D x L],
/// L = sum(durations). Character frames copy the character's table row;
/// blank frames interpolate the neighboring character rows with
/// blank_weights, sliding left to right. A boundary blank with one
/// neighbor uses that row alone. Gradients reach the table.
Tensor embed_expanded(const TokenSequence& t_blanked,
                      std::span<const int64_t> durations,
                      const Tensor& table);

}  // namespace tnet
