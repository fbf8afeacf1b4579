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

#ifndef PRONDIFF_PIPELINE_HPP
#define PRONDIFF_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prondiff/calibration.hpp"
#include "prondiff/clone_provider.hpp"
#include "prondiff/detector.hpp"
#include "prondiff/manifest.hpp"

namespace prondiff::pipeline {

/// How AMBIGUOUS verdicts enter binary metrics.
enum class AmbiguousMapping { Incorrect, Correct, Drop };

AmbiguousMapping ambiguous_mapping_from_string(std::string_view s);
std::string_view to_string(AmbiguousMapping m);

/// Distance-summary rows grouped by classification outcome (pred vs truth)
/// or by ground-truth label.
enum class SummaryGroupBy { Outcome, Truth };

SummaryGroupBy group_by_from_string(std::string_view s);
std::string_view to_string(SummaryGroupBy g);

struct LoadedUtterance {
  detector::UtterancePair pair;
  bool low_fidelity_alignment = false;  // proportional clone spans in use
  std::vector<std::string> warnings;
};

/// Load audio + grids for one manifest entry, resampling to the canonical
/// rate and pairing word spans. When the entry names no clone files, the
/// `<id>_clone.wav` local-store convention next to the manifest is tried.
/// A missing clone TextGrid falls back to proportional span mapping, marked
/// low-fidelity.
LoadedUtterance load_utterance(const manifest::ManifestEntry& entry, const std::string& tier,
                               const std::optional<std::string>& error_tier);

struct CalibrateOptions {
  std::filesystem::path manifest_path;
  double alpha = 0.1;
  double percentile = 90.0;
  distance::NormalizationStrategy strategy =
      distance::NormalizationStrategy::PeakAmplitude;
  mfcc::MfccConfig mfcc_config = mfcc::default_config();
  std::string tier = "words";
  std::optional<std::string> error_tier;
  int jobs = 1;
};

struct CalibrateOutput {
  calibration::CalibrationModel model;
  nlohmann::json summary;  // pool sizes + thresholds, the stdout payload
  std::vector<std::string> warnings;
};

CalibrateOutput run_calibrate(const CalibrateOptions& options);

struct DetectOptions {
  std::filesystem::path model_path;
  std::filesystem::path real_wav;
  std::filesystem::path real_textgrid;
  std::optional<std::filesystem::path> clone_wav;
  std::optional<std::filesystem::path> clone_textgrid;
  std::optional<std::string> endpoint;  // remote TTS service
  detector::DecisionStrategy decision = detector::DecisionStrategy::GlobalThreshold;
  std::string tier = "words";
  std::string utterance_id = "utterance";
  std::string voice_id;
  clone_provider::RemoteConfig remote = clone_provider::remote_config_from_env();
};

struct DetectOutput {
  nlohmann::json report;
  std::vector<std::string> warnings;
};

DetectOutput run_detect(const DetectOptions& options);

struct EvaluateOptions {
  std::filesystem::path model_path;
  std::filesystem::path manifest_path;
  detector::DecisionStrategy decision = detector::DecisionStrategy::CdfMedian;
  AmbiguousMapping ambiguous_as = AmbiguousMapping::Incorrect;
  SummaryGroupBy group_by = SummaryGroupBy::Outcome;
  std::string tier = "words";
  std::optional<std::string> error_tier;
  int jobs = 1;
};

struct EvaluateOutput {
  nlohmann::json report;
  std::vector<std::string> warnings;
};

EvaluateOutput run_evaluate(const EvaluateOptions& options);

/// Regroup the per-word records of an evaluation report into distance
/// summaries (Table-2-style), honoring a different grouping or ambiguous
/// mapping than the original run.
nlohmann::json summarize_report(const nlohmann::json& report, SummaryGroupBy group_by,
                                AmbiguousMapping ambiguous_as);

/// Render a report (evaluate or summarize output) as fixed-width text with
/// rates at 3 decimal places. The JSON keeps full precision; this is the
/// display form.
std::string report_to_table(const nlohmann::json& report);

}  // namespace prondiff::pipeline

#endif  // PRONDIFF_PIPELINE_HPP
