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

#ifndef PRONDIFF_METRICS_HPP
#define PRONDIFF_METRICS_HPP

#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "prondiff/audio.hpp"
#include "prondiff/types.hpp"

namespace prondiff::metrics {

/// Binary confusion counts with class 1 = incorrect/mispronounced.
struct ConfusionMatrix {
  long tp = 0;  // predicted incorrect, truly incorrect
  long fp = 0;  // predicted incorrect, truly correct
  long tn = 0;  // predicted correct, truly correct
  long fn = 0;  // predicted correct, truly incorrect

  long total() const { return tp + fp + tn + fn; }
};

struct ClassMetrics {
  std::string label;  // "0" (correct) or "1" (incorrect)
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct ClassReport {
  std::vector<ClassMetrics> classes;  // class 0 then class 1
  double accuracy = 0.0;
  long total = 0;
  // Degenerate-denominator cases (e.g. a class never predicted) reported as 0
  // get an explanatory note here.
  std::vector<std::string> notes;
};

ConfusionMatrix confusion_matrix(const std::vector<std::pair<PoolLabel, PoolLabel>>& pred_true);

/// Per-class precision/recall/F1/support and overall accuracy from
/// (predicted, true) label pairs. Throws EmptyInput.
ClassReport classification_report(const std::vector<std::pair<PoolLabel, PoolLabel>>& pred_true);

ClassReport classification_report(const ConfusionMatrix& cm);

/// Which summary group a distance belongs to (Table-2-style rows).
enum class SummaryOutcome { CorrectClassified, IncorrectClassified };

std::string_view to_string(SummaryOutcome o);

struct DistanceSummary {
  SummaryOutcome outcome = SummaryOutcome::CorrectClassified;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std_dev = 0.0;  // population
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Group distances by outcome and summarize each group with mean, median
/// (lower-quantile convention), population std, and quartiles. Empty groups
/// are omitted.
std::vector<DistanceSummary> distance_summary(
    const std::vector<std::pair<double, SummaryOutcome>>& distances);

struct StftMatrix {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> db;        // frames x bins, clamped to [-80, 0] re max
  std::vector<double> mean_mag;  // per-frame mean of linear magnitudes
  std::vector<double> frame_times;
  double bin_hz = 0.0;

  double at(std::size_t frame, std::size_t bin) const { return db[frame * bins + bin]; }
};

/// Hann-windowed STFT magnitudes in dB relative to the matrix maximum,
/// clamped to [-80, 0], plus the frame-wise mean-magnitude curve.
StftMatrix stft_magnitude(const audio::AudioBuffer& a, double frame_s, double hop_s);

/// CSV export: one row per frame (time_s, per-bin dB columns, mean_mag).
void write_stft_csv(const StftMatrix& m, std::ostream& out);

}  // namespace prondiff::metrics

#endif  // PRONDIFF_METRICS_HPP
