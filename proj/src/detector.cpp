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

#include "prondiff/detector.hpp"

#include <cmath>

#include "prondiff/distance.hpp"
#include "prondiff/errors.hpp"

namespace prondiff::detector {

std::string_view to_string(DecisionStrategy s) {
  switch (s) {
    case DecisionStrategy::GlobalThreshold:
      return "global";
    case DecisionStrategy::CdfMedian:
      return "cdf-median";
    case DecisionStrategy::Kde:
      return "kde";
  }
  return "global";
}

DecisionStrategy decision_from_string(std::string_view s) {
  if (s == "global") return DecisionStrategy::GlobalThreshold;
  if (s == "cdf-median") return DecisionStrategy::CdfMedian;
  if (s == "kde") return DecisionStrategy::Kde;
  throw UsageError("unknown decision strategy '" + std::string(s) +
                   "' (expected global|cdf-median|kde)");
}

std::string_view to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::Correct:
      return "CORRECT";
    case VerdictLabel::Incorrect:
      return "INCORRECT";
    case VerdictLabel::Ambiguous:
      return "AMBIGUOUS";
  }
  return "CORRECT";
}

WordVerdict decide_global(double d_bar, const calibration::CalibrationModel& model) {
  WordVerdict v;
  v.d_bar = d_bar;
  v.label = d_bar > model.tau_global ? VerdictLabel::Incorrect : VerdictLabel::Correct;
  return v;
}

namespace {

// Shared accept rule: the selected class must also clear its threshold.
VerdictLabel resolve(PoolLabel selected, double d_bar, double tau_c, double tau_i) {
  if (selected == PoolLabel::Correct && d_bar <= tau_c) return VerdictLabel::Correct;
  if (selected == PoolLabel::Incorrect && d_bar >= tau_i) return VerdictLabel::Incorrect;
  return VerdictLabel::Ambiguous;
}

}  // namespace

WordVerdict decide_cdf_median(double d_bar, const calibration::CalibrationModel& model) {
  if (!model.class_strategies_enabled() || !model.tau_correct || !model.tau_incorrect)
    throw MissingClassPools("cdf-median strategy needs both class pools in the model");

  WordVerdict v;
  v.d_bar = d_bar;
  v.p_correct = calibration::empirical_cdf(model.pool_correct, d_bar);
  v.p_incorrect = calibration::empirical_cdf(model.pool_incorrect, d_bar);
  const double delta_c = std::abs(*v.p_correct - 0.5);
  const double delta_i = std::abs(*v.p_incorrect - 0.5);
  // Ties select incorrect: the rule reads "correct only when strictly nearer".
  v.selected_distribution = delta_c < delta_i ? PoolLabel::Correct : PoolLabel::Incorrect;
  v.label = resolve(*v.selected_distribution, d_bar, *model.tau_correct, *model.tau_incorrect);
  return v;
}

WordVerdict decide_kde(double d_bar, const calibration::CalibrationModel& model) {
  if (!model.class_strategies_enabled() || !model.tau_correct || !model.tau_incorrect)
    throw MissingClassPools("kde strategy needs both class pools in the model");
  if (!model.kde_enabled())
    throw MissingKde("model has no fitted KDE bandwidths (degenerate calibration pool)");

  WordVerdict v;
  v.d_bar = d_bar;
  const double k_cor =
      calibration::kde_density(model.pool_correct, *model.kde_bandwidth_correct, d_bar);
  const double k_inc =
      calibration::kde_density(model.pool_incorrect, *model.kde_bandwidth_incorrect, d_bar);
  v.selected_distribution = k_inc > k_cor ? PoolLabel::Incorrect : PoolLabel::Correct;
  v.label = resolve(*v.selected_distribution, d_bar, *model.tau_correct, *model.tau_incorrect);
  return v;
}

DetectionResult detect_utterance(const UtterancePair& pair,
                                 const calibration::CalibrationModel& model,
                                 DecisionStrategy strategy) {
  DetectionResult result;
  if (pair.alignments.empty()) return result;

  DecisionStrategy effective = strategy;
  if (strategy == DecisionStrategy::Kde && !model.kde_enabled()) {
    effective = DecisionStrategy::CdfMedian;
    result.warnings.push_back(
        "model has no fitted KDE; falling back to cdf-median for utterance '" + pair.id + "'");
  }

  const double peak = audio::peak_amplitude(pair.real_audio);

  for (const textgrid::WordAlignment& wa : pair.alignments) {
    audio::AudioBuffer real_span =
        audio::slice(pair.real_audio, wa.real_start, wa.real_end);
    audio::AudioBuffer clone_span =
        audio::slice(pair.clone_audio, wa.clone_start, wa.clone_end);

    distance::WordDistance wd;
    try {
      wd = distance::word_distance(real_span, clone_span, peak, model.mfcc_config,
                                   model.strategy, wa.word, static_cast<int>(wa.index));
    } catch (const BufferTooShort& e) {
      result.warnings.push_back("word '" + wa.word + "' (index " + std::to_string(wa.index) +
                                ") skipped: " + e.what());
      continue;
    }

    WordVerdict v;
    switch (effective) {
      case DecisionStrategy::GlobalThreshold:
        v = decide_global(wd.d_bar, model);
        break;
      case DecisionStrategy::CdfMedian:
        v = decide_cdf_median(wd.d_bar, model);
        break;
      case DecisionStrategy::Kde:
        v = decide_kde(wd.d_bar, model);
        break;
    }
    v.word = wa.word;
    v.index = static_cast<int>(wa.index);
    result.verdicts.push_back(std::move(v));
  }
  return result;
}

}  // namespace prondiff::detector
