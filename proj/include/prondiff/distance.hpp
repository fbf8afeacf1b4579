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

#ifndef PRONDIFF_DISTANCE_HPP
#define PRONDIFF_DISTANCE_HPP

#include <string>
#include <string_view>

#include "prondiff/audio.hpp"
#include "prondiff/mfcc.hpp"

namespace prondiff::distance {

/// How the raw DTW distance becomes the word-level normalized distance d_bar.
///  - PeakAmplitude: joint 13-dim DTW divided by the peak amplitude of the
///    FULL real utterance (not the word span).
///  - PerCoefficientMean: per-coefficient scalar DTW after resampling both
///    envelopes to T_hat frames, averaged over 13 * T_hat.
enum class NormalizationStrategy { PeakAmplitude, PerCoefficientMean };

std::string_view to_string(NormalizationStrategy s);
NormalizationStrategy strategy_from_string(std::string_view s);

struct WordDistance {
  std::string word;
  int index = -1;
  double d_dtw = 0.0;  // raw DTW total before normalization
  double d_bar = 0.0;  // normalized distance
  NormalizationStrategy strategy = NormalizationStrategy::PeakAmplitude;
};

/// Compute d_bar for one word from its real and clone span audio. Throws
/// ZeroPeak when the PeakAmplitude strategy gets a silent utterance, and
/// propagates BufferTooShort for spans shorter than one MFCC frame.
WordDistance word_distance(const audio::AudioBuffer& real_span,
                           const audio::AudioBuffer& clone_span, double utterance_peak,
                           const mfcc::MfccConfig& cfg, NormalizationStrategy strategy,
                           const std::string& word = {}, int index = -1);

}  // namespace prondiff::distance

#endif  // PRONDIFF_DISTANCE_HPP
