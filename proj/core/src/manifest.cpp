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

#include "tnet/manifest.hpp"

#include <fstream>

#include "tnet/error.hpp"

namespace tnet {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);

  std::vector<ManifestEntry> entries;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t bar = line.find('|');
    if (bar == std::string::npos)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected `stem|transcript`");
    ManifestEntry e;
    e.stem = line.substr(0, bar);
    const size_t next = line.find('|', bar + 1);
    e.transcript = next == std::string::npos
                       ? line.substr(bar + 1)
                       : line.substr(bar + 1, next - bar - 1);
    if (e.stem.empty())
      throw IoError(path + ":" + std::to_string(lineno) + ": empty stem");
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace tnet
