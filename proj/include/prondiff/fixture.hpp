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

#ifndef PRONDIFF_FIXTURE_HPP
#define PRONDIFF_FIXTURE_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "prondiff/manifest.hpp"

namespace prondiff::fixture {

/// Synthetic corpus parameters. Words are formant-like tone complexes;
/// "mispronounced" words shift the second tone, emulating a vowel-quality
/// change. A small share of mispronounced words get only a mild shift so
/// their distances land between the class pools (midpoint probes for the
/// AMBIGUOUS verdict).
struct FixtureOptions {
  std::uint32_t seed = 42;
  std::filesystem::path out_dir;
  int n_utterances = 10;
  int words_per_utterance = 5;
  double misp_rate = 0.4;
  int sample_rate = 16000;
};

struct FixtureSummary {
  manifest::Manifest manifest;
  std::filesystem::path manifest_path;
  int total_words = 0;
  int incorrect_words = 0;
};

/// Generate WAV pairs, TextGrids, and a fully labeled manifest under
/// options.out_dir. Deterministic: the same options produce byte-identical
/// files. Clone files follow the `<id>_clone.wav` / `<id>_clone.TextGrid`
/// local-store naming.
FixtureSummary generate_fixture(const FixtureOptions& options);

}  // namespace prondiff::fixture

#endif  // PRONDIFF_FIXTURE_HPP
