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

#include "prondiff/distance.hpp"

#include <numeric>

#include "prondiff/dtw.hpp"
#include "prondiff/errors.hpp"

namespace prondiff::distance {

std::string_view to_string(NormalizationStrategy s) {
  switch (s) {
    case NormalizationStrategy::PeakAmplitude:
      return "peak_amplitude";
    case NormalizationStrategy::PerCoefficientMean:
      return "per_coefficient_mean";
  }
  return "peak_amplitude";
}

NormalizationStrategy strategy_from_string(std::string_view s) {
  if (s == "peak_amplitude") return NormalizationStrategy::PeakAmplitude;
  if (s == "per_coefficient_mean") return NormalizationStrategy::PerCoefficientMean;
  throw UsageError("unknown normalization strategy '" + std::string(s) + "'");
}

WordDistance word_distance(const audio::AudioBuffer& real_span,
                           const audio::AudioBuffer& clone_span, double utterance_peak,
                           const mfcc::MfccConfig& cfg, NormalizationStrategy strategy,
                           const std::string& word, int index) {
  WordDistance out;
  out.word = word;
  out.index = index;
  out.strategy = strategy;

  const mfcc::MfccMatrix real_env = mfcc::extract_mfcc(real_span, cfg);
  const mfcc::MfccMatrix clone_env = mfcc::extract_mfcc(clone_span, cfg);

  if (strategy == NormalizationStrategy::PeakAmplitude) {
    if (!(utterance_peak > 0.0))
      throw ZeroPeak("utterance peak amplitude is zero; cannot normalize");
    out.d_dtw = dtw::dtw_joint(real_env, clone_env).distance;
    out.d_bar = out.d_dtw / utterance_peak;
  } else {
    const auto per_coef = dtw::dtw_per_coefficient(real_env, clone_env);
    out.d_dtw = std::accumulate(per_coef.distances.begin(), per_coef.distances.end(), 0.0);
    out.d_bar = out.d_dtw / (static_cast<double>(mfcc::kNumCoefficients) *
                             static_cast<double>(per_coef.t_hat));
  }
  return out;
}

}  // namespace prondiff::distance
