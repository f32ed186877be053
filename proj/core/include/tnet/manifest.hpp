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

#include <string>
#include <vector>

namespace tnet {

struct ManifestEntry {
  std::string stem;        // file stem, no directory or extension
  std::string transcript;  // raw, without normalization
};

/// Parses a pipe-separated metadata file, one `stem|transcript[|...]` row
/// per line. The second field is the transcript; extra fields are ignored.
/// Blank lines are skipped; a line without '|' raises IoError with its
/// line number.
std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace tnet
