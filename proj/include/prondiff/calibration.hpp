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

#ifndef PRONDIFF_CALIBRATION_HPP
#define PRONDIFF_CALIBRATION_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prondiff/distance.hpp"
#include "prondiff/mfcc.hpp"
#include "prondiff/types.hpp"

namespace prondiff::calibration {

/// Sorted ascending pool of normalized distances for one class.
struct DistancePool {
  std::vector<double> values;

  bool empty() const { return values.empty(); }
  std::size_t size() const { return values.size(); }
};

DistancePool make_pool(std::vector<double> values);  // sorts and validates

/// q-th smallest value with q = ceil((N+1)(1-alpha)) clamped to [1, N], so
/// that the pool satisfies Pr(d <= tau) >= 1 - alpha.
double order_statistic_threshold(const DistancePool& pool, double alpha);

/// Lower-quantile convention: the smallest pool value x with F(x) >= p/100.
/// No interpolation.
double percentile_threshold(const DistancePool& pool, double percent);

/// Fraction of the pool at or below x (binary search over the sorted pool).
double empirical_cdf(const DistancePool& pool, double x);

/// Silverman rule-of-thumb bandwidth h = 0.9 * min(sigma, IQR/1.34) * N^(-1/5)
/// (sigma alone when the IQR collapses to zero). Throws DegeneratePool for
/// pools of size < 2 or zero variance.
double kde_fit(const DistancePool& pool);

/// Gaussian KDE density (N*h)^-1 * sum phi((x - d_k)/h).
double kde_density(const DistancePool& pool, double bandwidth, double x);

struct CalibrationModel {
  int version = 1;
  double alpha = 0.1;
  double percentile = 90.0;
  distance::NormalizationStrategy strategy = distance::NormalizationStrategy::PeakAmplitude;
  mfcc::MfccConfig mfcc_config;
  double tau_global = 0.0;
  std::optional<double> tau_correct;
  std::optional<double> tau_incorrect;
  DistancePool pool_correct;
  DistancePool pool_incorrect;
  std::optional<double> kde_bandwidth_correct;
  std::optional<double> kde_bandwidth_incorrect;
  // Calibration source ids, kept so evaluate can warn about train/test overlap.
  std::vector<std::string> utterance_ids;

  bool class_strategies_enabled() const {
    return !pool_correct.empty() && !pool_incorrect.empty();
  }
  bool kde_enabled() const {
    return kde_bandwidth_correct.has_value() && kde_bandwidth_incorrect.has_value();
  }
};

/// Build the model from labeled distances: split pools per ground truth,
/// tau_global from the pooled order statistic, class thresholds from the
/// given percentile, and per-class KDE bandwidths (skipped, with a warning
/// pushed to `warnings`, when a pool is degenerate).
CalibrationModel calibrate(const std::vector<std::pair<distance::WordDistance, PoolLabel>>& labeled,
                           double alpha, double percentile,
                           std::vector<std::string>* warnings = nullptr);

std::string model_to_json(const CalibrationModel& model);
CalibrationModel model_from_json(const std::string& text);
void save_model(const CalibrationModel& model, const std::filesystem::path& path);
CalibrationModel load_model(const std::filesystem::path& path);

}  // namespace prondiff::calibration

#endif  // PRONDIFF_CALIBRATION_HPP
