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
#include <string>
#include <vector>

#include "tnet/textproc.hpp"

namespace tnet {

/// Per-frame recognizer scores, frame-major [T x V]. The vocabulary lists
/// one symbol per column and must contain the blank exactly once.
struct CtcMatrix {
  int64_t frames = 0;
  std::vector<char32_t> vocabulary;
  std::vector<float> scores;

  int blank_index() const;
  void validate() const;
};

CtcMatrix read_ctc_matrix(const std::string& path);
void write_ctc_matrix(const std::string& path, const CtcMatrix& m);

/// Run-length encoded best path; durations are positive, adjacent runs
/// differ in symbol, and durations sum to the frame count.
struct RlePath {
  struct Run {
    char32_t symbol;
    int64_t duration;
  };
  std::vector<Run> runs;

  int64_t total() const;
  std::vector<char32_t> symbols_without_blank(char32_t blank) const;
};

/// Per-frame argmax (ties pick the lowest column), then run-length
/// encoding.
RlePath greedy_decode(const CtcMatrix& m);

enum class EditType { Match, Substitute, Delete, Insert };

struct EditOp {
  EditType type;
  int64_t decoded_index;    // -1 for Insert
  int64_t reference_index;  // -1 for Delete
};

/// Global edit alignment of two non-empty symbol sequences: match +1,
/// mismatch -1, gap -1. Traceback ties prefer match, then substitute,
/// then delete, then insert, making the alignment deterministic.
std::vector<EditOp> global_align(const std::vector<char32_t>& decoded,
                                 const std::vector<char32_t>& reference);

/// Blank-interleaved durations for a reference symbol sequence:
/// tokens = [blank, r1, blank, ..., rN, blank], durations aligned 1:1,
/// durations sum to total_frames.
struct DurationMap {
  std::vector<char32_t> tokens;
  std::vector<int64_t> durations;
  int64_t total_frames = 0;

  void validate() const;
};

/// Redistributes best-path durations onto the reference sequence. Matched
/// and substituted runs keep their durations on the reference character;
/// deleted runs donate to the preceding blank slot; inserted characters
/// get zero. Blank runs accumulate on the blank slot open where they
/// appear. Frame mass is conserved exactly.
DurationMap correct_durations(const RlePath& path,
                              const std::vector<EditOp>& ops,
                              const std::vector<char32_t>& reference,
                              int64_t total_frames);

/// Gives every zero-duration character one frame taken from the larger
/// adjacent blank (ties prefer the preceding one). If both are empty the
/// search widens outward, preceding first. Raises AlignmentError when no
/// blank frame is available anywhere.
DurationMap repair_zeros(const DurationMap& d);

/// Full extraction: normalize the transcript against the standard symbol
/// set, greedy-decode, align, correct, repair.
DurationMap extract_durations(const CtcMatrix& m,
                              const std::string& transcript);

std::string format_durations(const DurationMap& d);
DurationMap parse_durations(const std::string& text);
void write_durations(const std::string& path, const DurationMap& d);
DurationMap read_durations(const std::string& path);

}  // namespace tnet
