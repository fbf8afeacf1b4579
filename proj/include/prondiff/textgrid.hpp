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

#ifndef PRONDIFF_TEXTGRID_HPP
#define PRONDIFF_TEXTGRID_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace prondiff::textgrid {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  std::string label;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct IntervalTier {
  std::string name;
  std::vector<Interval> intervals;

  friend bool operator==(const IntervalTier&, const IntervalTier&) = default;
};

struct TextGrid {
  double xmin = 0.0;
  double xmax = 0.0;
  std::vector<IntervalTier> tiers;

  friend bool operator==(const TextGrid&, const TextGrid&) = default;
};

/// One word paired across the real and clone renditions of an utterance.
struct WordAlignment {
  std::string word;
  double real_start = 0.0;
  double real_end = 0.0;
  double clone_start = 0.0;
  double clone_end = 0.0;
  std::size_t index = 0;
};

/// Parse a Praat "long" text-format TextGrid. Accepts UTF-8 (with or without
/// BOM) and UTF-16 (with BOM). Point tiers are parsed and skipped; short and
/// binary formats are rejected. Throws MalformedTextGrid.
TextGrid parse_textgrid(std::string_view content);

TextGrid load_textgrid(const std::filesystem::path& path);

/// Write the grid back out in Praat long text format (UTF-8).
/// parse_textgrid(serialize_textgrid(g)) == g.
std::string serialize_textgrid(const TextGrid& g);

/// Labels treated as non-words by forced-aligner convention, matched
/// case-insensitively on the trimmed label: "", sp, sil, spn, <unk>.
bool is_silence_label(std::string_view label);

/// Trimmed, punctuation-stripped intervals of the named tier, in order.
/// Case-insensitive tier lookup; throws TierNotFound.
std::vector<Interval> word_intervals(const TextGrid& g, std::string_view tier_name);

/// Pair the k-th non-silence word of the real grid with the k-th of the clone
/// grid. Labels must match case-insensitively after punctuation stripping;
/// throws WordSequenceMismatch otherwise (the clone was synthesized from a
/// different transcript).
std::vector<WordAlignment> extract_word_alignments(const TextGrid& real, const TextGrid& clone,
                                                   std::string_view tier_name);

/// Indices of words whose real span is covered by a phone-error interval for
/// more than half of that error interval's duration. Empty-label error
/// intervals are ignored.
std::vector<std::size_t> words_overlapping_errors(const std::vector<WordAlignment>& words,
                                                  const IntervalTier& error_tier);

}  // namespace prondiff::textgrid

#endif  // PRONDIFF_TEXTGRID_HPP
