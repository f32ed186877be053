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

#include "tnet/ctc_align.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tnet/error.hpp"

namespace tnet {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'C', 'M'};

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
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

int CtcMatrix::blank_index() const {
  const auto it =
      std::find(vocabulary.begin(), vocabulary.end(), kBlankChar);
  if (it == vocabulary.end())
    throw InvalidArgument("CTC vocabulary has no blank symbol");
  return static_cast<int>(it - vocabulary.begin());
}

void CtcMatrix::validate() const {
  if (frames <= 0) throw InvalidArgument("CTC matrix has no frames");
  if (vocabulary.empty()) throw InvalidArgument("CTC vocabulary is empty");
  if (std::count(vocabulary.begin(), vocabulary.end(), kBlankChar) != 1)
    throw InvalidArgument("CTC vocabulary must contain the blank exactly "
                          "once");
  const size_t expect =
      static_cast<size_t>(frames) * vocabulary.size();
  if (scores.size() != expect)
    throw InvalidArgument("CTC matrix has " + std::to_string(scores.size()) +
                          " scores, expected " + std::to_string(expect));
  for (float v : scores)
    if (!std::isfinite(v))
      throw InvalidArgument("CTC matrix contains a non-finite score");
}

void write_ctc_matrix(const std::string& path, const CtcMatrix& m) {
  m.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_u32le(out, static_cast<uint32_t>(m.frames));
  write_u32le(out, static_cast<uint32_t>(m.vocabulary.size()));
  const std::string vocab = utf8_encode(m.vocabulary);
  write_u32le(out, static_cast<uint32_t>(vocab.size()));
  out.write(vocab.data(), static_cast<std::streamsize>(vocab.size()));
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(m.scores.data()),
            static_cast<std::streamsize>(m.scores.size() * 4));
  if (!out) throw IoError("failed writing " + path);
}

CtcMatrix read_ctc_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": bad magic, not a CTC matrix file");
  CtcMatrix m;
  m.frames = read_u32le(in);
  const uint32_t vsize = read_u32le(in);
  const uint32_t vbytes = read_u32le(in);
  std::string vocab(vbytes, '\0');
  in.read(vocab.data(), vbytes);
  if (!in) throw IoError(path + ": truncated vocabulary");
  m.vocabulary = utf8_decode(vocab);
  if (m.vocabulary.size() != vsize)
    throw IoError(path + ": vocabulary length does not match header");
  m.scores.resize(static_cast<size_t>(m.frames) * vsize);
  in.read(reinterpret_cast<char*>(m.scores.data()),
          static_cast<std::streamsize>(m.scores.size() * 4));
  if (!in) throw IoError(path + ": truncated score block");
  m.validate();
  return m;
}

int64_t RlePath::total() const {
  int64_t t = 0;
  for (const Run& r : runs) t += r.duration;
  return t;
}

std::vector<char32_t> RlePath::symbols_without_blank(char32_t blank) const {
  std::vector<char32_t> out;
  for (const Run& r : runs)
    if (r.symbol != blank) out.push_back(r.symbol);
  return out;
}

RlePath greedy_decode(const CtcMatrix& m) {
  m.validate();
  const int V = static_cast<int>(m.vocabulary.size());
  RlePath path;
  for (int64_t t = 0; t < m.frames; ++t) {
    const float* row = m.scores.data() + static_cast<size_t>(t) * V;
    int best = 0;
    for (int v = 1; v < V; ++v)
      if (row[v] > row[best]) best = v;
    const char32_t sym = m.vocabulary[best];
    if (!path.runs.empty() && path.runs.back().symbol == sym)
      ++path.runs.back().duration;
    else
      path.runs.push_back({sym, 1});
  }
  return path;
}

std::vector<EditOp> global_align(const std::vector<char32_t>& decoded,
                                 const std::vector<char32_t>& reference) {
  if (decoded.empty() || reference.empty())
    throw InvalidArgument("global_align requires non-empty sequences");
  const int64_t n = static_cast<int64_t>(decoded.size());
  const int64_t m = static_cast<int64_t>(reference.size());

  // score[i][j]: best alignment of decoded[0..i) with reference[0..j);
  // match +1, mismatch -1, gap -1.
  std::vector<int64_t> score((n + 1) * (m + 1));
  auto S = [&](int64_t i, int64_t j) -> int64_t& {
    return score[i * (m + 1) + j];
  };
  for (int64_t i = 0; i <= n; ++i) S(i, 0) = -i;
  for (int64_t j = 0; j <= m; ++j) S(0, j) = -j;
  for (int64_t i = 1; i <= n; ++i) {
    for (int64_t j = 1; j <= m; ++j) {
      const int64_t diag =
          S(i - 1, j - 1) + (decoded[i - 1] == reference[j - 1] ? 1 : -1);
      S(i, j) = std::max({diag, S(i - 1, j) - 1, S(i, j - 1) - 1});
    }
  }

  // Traceback, ties resolved match > substitute > delete > insert.
  std::vector<EditOp> ops;
  int64_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && decoded[i - 1] == reference[j - 1] &&
        S(i, j) == S(i - 1, j - 1) + 1) {
      ops.push_back({EditType::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && decoded[i - 1] != reference[j - 1] &&
               S(i, j) == S(i - 1, j - 1) - 1) {
      ops.push_back({EditType::Substitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && S(i, j) == S(i - 1, j) - 1) {
      ops.push_back({EditType::Delete, i - 1, -1});
      --i;
    } else if (j > 0 && S(i, j) == S(i, j - 1) - 1) {
      ops.push_back({EditType::Insert, -1, j - 1});
      --j;
    } else {
      throw Error("global_align traceback dead end");  // unreachable
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

void DurationMap::validate() const {
  if (tokens.size() != durations.size())
    throw InvalidArgument("duration map token/duration length mismatch");
  if (tokens.size() % 2 != 1 || tokens.empty())
    throw InvalidArgument("duration map must have 2N + 1 entries");
  int64_t sum = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const bool should_be_blank = i % 2 == 0;
    if ((tokens[i] == kBlankChar) != should_be_blank)
      throw InvalidArgument("duration map token " + std::to_string(i) +
                            " breaks blank interleaving");
    if (durations[i] < 0)
      throw InvalidArgument("negative duration at token " +
                            std::to_string(i));
    sum += durations[i];
  }
  if (sum != total_frames)
    throw InvalidArgument("durations sum to " + std::to_string(sum) +
                          " but total_frames is " +
                          std::to_string(total_frames));
}

DurationMap correct_durations(const RlePath& path,
                              const std::vector<EditOp>& ops,
                              const std::vector<char32_t>& reference,
                              int64_t total_frames) {
  const int64_t N = static_cast<int64_t>(reference.size());
  DurationMap out;
  out.total_frames = total_frames;
  out.tokens.resize(2 * N + 1, kBlankChar);
  for (int64_t k = 0; k < N; ++k) out.tokens[2 * k + 1] = reference[k];
  out.durations.assign(2 * N + 1, 0);

  // Walk ops and runs together. ref_done counts consumed reference
  // characters, so 2 * ref_done is always the currently open blank slot.
  // Blank runs flush before each op, attaching as early as possible.
  size_t run = 0;
  int64_t ref_done = 0;
  const auto flush_blanks = [&] {
    while (run < path.runs.size() &&
           path.runs[run].symbol == kBlankChar) {
      out.durations[2 * ref_done] += path.runs[run].duration;
      ++run;
    }
  };
  for (const EditOp& op : ops) {
    flush_blanks();
    switch (op.type) {
      case EditType::Match:
      case EditType::Substitute:
        if (run >= path.runs.size() || ref_done >= N)
          throw Error("duration correction ran past the path");
        out.durations[2 * ref_done + 1] += path.runs[run].duration;
        ++run;
        ++ref_done;
        break;
      case EditType::Delete:
        // Spurious decoded run: its frames go to the preceding blank.
        if (run >= path.runs.size())
          throw Error("duration correction ran past the path");
        out.durations[2 * ref_done] += path.runs[run].duration;
        ++run;
        break;
      case EditType::Insert:
        if (ref_done >= N)
          throw Error("duration correction ran past the reference");
        ++ref_done;  // character missing from the path keeps duration 0
        break;
    }
  }
  flush_blanks();
  if (run != path.runs.size() || ref_done != N)
    throw Error("duration correction left unconsumed runs");

  out.validate();  // also asserts exact frame conservation
  return out;
}

DurationMap repair_zeros(const DurationMap& d) {
  d.validate();
  DurationMap out = d;
  const int64_t n = static_cast<int64_t>(out.tokens.size());
  for (int64_t i = 1; i < n; i += 2) {
    if (out.durations[i] != 0) continue;
    const int64_t left = out.durations[i - 1];
    const int64_t right = out.durations[i + 1];
    int64_t donor = -1;
    if (left > 0 || right > 0) {
      donor = left >= right ? i - 1 : i + 1;
    } else {
      // Widen outward over blank slots, preceding side first.
      for (int64_t dist = 3; donor < 0 && dist < n; dist += 2) {
        if (i - dist >= 0 && out.durations[i - dist] > 0 &&
            out.tokens[i - dist] == kBlankChar)
          donor = i - dist;
        else if (i + dist < n && out.durations[i + dist] > 0 &&
                 out.tokens[i + dist] == kBlankChar)
          donor = i + dist;
      }
    }
    if (donor < 0)
      throw AlignmentError(
          "no blank frames available to give character '" +
          utf8_encode(out.tokens[i]) + "' at position " + std::to_string(i) +
          " a nonzero duration");
    --out.durations[donor];
    ++out.durations[i];
  }
  out.validate();
  return out;
}

DurationMap extract_durations(const CtcMatrix& m,
                              const std::string& transcript) {
  m.validate();

  // Reference symbols: text rules first, then anything outside the matrix
  // vocabulary (or colliding with the blank) becomes the unknown marker.
  // An unknown never matches a decoded run; it is inserted with zero
  // duration and repaired afterwards.
  std::vector<char32_t> reference = normalize_text(transcript);
  if (reference.empty())
    throw InvalidArgument("transcript is empty after normalization");
  for (char32_t& c : reference) {
    const bool known =
        std::find(m.vocabulary.begin(), m.vocabulary.end(), c) !=
        m.vocabulary.end();
    if (!known || c == kBlankChar) c = kUnknownChar;
  }

  const RlePath path = greedy_decode(m);
  const std::vector<char32_t> decoded =
      path.symbols_without_blank(kBlankChar);

  std::vector<EditOp> ops;
  if (decoded.empty()) {
    // All-blank best path: every reference character is an insertion.
    for (int64_t j = 0; j < static_cast<int64_t>(reference.size()); ++j)
      ops.push_back({EditType::Insert, -1, j});
  } else {
    ops = global_align(decoded, reference);
  }

  const DurationMap corrected =
      correct_durations(path, ops, reference, m.frames);
  return repair_zeros(corrected);
}

std::string format_durations(const DurationMap& d) {
  d.validate();
  std::string out;
  for (size_t i = 0; i < d.tokens.size(); ++i) {
    out += utf8_encode(d.tokens[i]);
    out += '\t';
    out += std::to_string(d.durations[i]);
    out += '\n';
  }
  out += "#total\t" + std::to_string(d.total_frames) + "\n";
  return out;
}

DurationMap parse_durations(const std::string& text) {
  DurationMap d;
  std::istringstream in(text);
  std::string line;
  bool saw_total = false;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (saw_total)
      throw IoError("line " + std::to_string(lineno) +
                    ": content after the #total line");
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw IoError("line " + std::to_string(lineno) +
                    ": expected `token<TAB>duration`");
    const std::string tok = line.substr(0, tab);
    int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw IoError("line " + std::to_string(lineno) +
                    ": duration is not an integer");
    }
    if (tok == "#total") {
      d.total_frames = count;
      saw_total = true;
      continue;
    }
    const std::vector<char32_t> sym = utf8_decode(tok);
    if (sym.size() != 1)
      throw IoError("line " + std::to_string(lineno) +
                    ": token must be a single symbol");
    d.tokens.push_back(sym[0]);
    d.durations.push_back(count);
  }
  if (!saw_total) throw IoError("missing #total line");
  d.validate();
  return d;
}

void write_durations(const std::string& path, const DurationMap& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const std::string text = format_durations(d);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path);
}

DurationMap read_durations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_durations(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace tnet
