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

#ifndef PRONDIFF_DETECTOR_HPP
#define PRONDIFF_DETECTOR_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prondiff/audio.hpp"
#include "prondiff/calibration.hpp"
#include "prondiff/textgrid.hpp"
#include "prondiff/types.hpp"

namespace prondiff::detector {

enum class DecisionStrategy { GlobalThreshold, CdfMedian, Kde };

std::string_view to_string(DecisionStrategy s);
DecisionStrategy decision_from_string(std::string_view s);

enum class VerdictLabel { Correct, Incorrect, Ambiguous };

std::string_view to_string(VerdictLabel label);

struct WordVerdict {
  std::string word;
  int index = -1;
  double d_bar = 0.0;
  std::optional<PoolLabel> selected_distribution;  // D*
  VerdictLabel label = VerdictLabel::Correct;
  std::optional<double> p_correct;
  std::optional<double> p_incorrect;
};

/// d_bar > tau_global ? INCORRECT : CORRECT. Never AMBIGUOUS; equality at the
/// threshold counts as CORRECT (strict inequality, as defined).
WordVerdict decide_global(double d_bar, const calibration::CalibrationModel& model);

/// Pick the class whose empirical CDF value is nearest 0.5 (ties go to
/// incorrect), then accept only if the matching class threshold agrees:
/// CORRECT iff D* = correct and d_bar <= tau_C; INCORRECT iff D* = incorrect
/// and d_bar >= tau_I; AMBIGUOUS otherwise.
WordVerdict decide_cdf_median(double d_bar, const calibration::CalibrationModel& model);

/// Same accept rule but the class is chosen by comparing fitted KDE
/// densities: incorrect iff K_inc(d_bar) > K_cor(d_bar).
WordVerdict decide_kde(double d_bar, const calibration::CalibrationModel& model);

/// Real + clone audio with their word alignments; the unit the detector and
/// the evaluation pipeline operate on.
struct UtterancePair {
  std::string id;
  audio::AudioBuffer real_audio;
  audio::AudioBuffer clone_audio;
  std::vector<textgrid::WordAlignment> alignments;
  // Ground truth per alignment index when known (calibration / evaluation).
  std::vector<std::optional<PoolLabel>> labels;
};

struct DetectionResult {
  std::vector<WordVerdict> verdicts;  // one per undegenerate word, in order
  std::vector<std::string> warnings;  // skipped words, strategy fallbacks
};

/// Run the detection phase over every aligned word of one utterance. Words
/// whose span is shorter than one MFCC frame are skipped with a warning.
/// A kde request on a model without fitted bandwidths falls back to
/// cdf-median (also warned).
DetectionResult detect_utterance(const UtterancePair& pair,
                                 const calibration::CalibrationModel& model,
                                 DecisionStrategy strategy);

}  // namespace prondiff::detector

#endif  // PRONDIFF_DETECTOR_HPP
