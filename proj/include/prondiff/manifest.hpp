// Copyright 2026 The prondiff Authors
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

#ifndef PRONDIFF_MANIFEST_HPP
#define PRONDIFF_MANIFEST_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prondiff/types.hpp"

namespace prondiff::manifest {

struct WordLabelEntry {
  int index = 0;
  PoolLabel label = PoolLabel::Correct;
};

struct ManifestEntry {
  std::string utterance_id;
  std::filesystem::path real_wav;
  std::filesystem::path real_textgrid;
  std::optional<std::filesystem::path> clone_wav;
  std::optional<std::filesystem::path> clone_textgrid;
  std::vector<WordLabelEntry> word_labels;

  std::optional<PoolLabel> label_for(int word_index) const;
};

/// One speaker's utterance list. Relative paths are resolved against the
/// manifest file's directory on load.
struct Manifest {
  int version = 1;
  std::string speaker;
  std::vector<ManifestEntry> entries;
};

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& m, const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

}  // namespace prondiff::manifest

#endif  // PRONDIFF_MANIFEST_HPP
