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

// prondiff: word-level mispronunciation detection by comparing a speaker's
// utterance against a pronunciation-corrected voice clone.
//
// Exit codes: 0 success, 1 usage error, 2 data/I-O error, 3 remote-service
// failure. stdout carries only machine-readable payload; diagnostics go to
// stderr as one JSON object per line.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prondiff/audio.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/fixture.hpp"
#include "prondiff/metrics.hpp"
#include "prondiff/pipeline.hpp"

namespace {

using nlohmann::json;
using namespace prondiff;

void emit_diagnostic(const std::string& level, const std::string& type,
                     const std::string& message) {
  json j;
  j["level"] = level;
  j["type"] = type;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

void emit_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) emit_diagnostic("warning", "Warning", w);
}

void write_payload(const std::string& payload, const std::optional<std::string>& out_path) {
  if (out_path) {
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write output file " + *out_path);
    out << payload;
  } else {
    std::cout << payload;
  }
}

int exit_code_for(const Error& e) {
  const std::string& kind = e.kind();
  if (kind == "UsageError") return 1;
  if (kind == "Timeout" || kind == "RemoteError" || kind == "BadPayload") return 3;
  return 2;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + " is not valid JSON: " + e.what());
  }
}

struct CommonStrings {
  std::string normalization = "peak_amplitude";
  std::string decision = "cdf-median";
  std::string ambiguous_as = "incorrect";
  std::string group_by = "outcome";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Detect word-level mispronunciations by comparing utterances with "
      "pronunciation-corrected voice clones"};
  app.require_subcommand(1);

  CommonStrings strings;

  // ---- calibrate ----
  auto* cal = app.add_subcommand(
      "calibrate", "Build a calibration model from a labeled manifest");
  pipeline::CalibrateOptions cal_opts;
  std::string cal_manifest;
  std::string cal_out = "model.json";
  std::string cal_error_tier;
  cal->add_option("--manifest", cal_manifest, "Labeled manifest JSON")->required();
  cal->add_option("--out", cal_out, "Model file to write")->capture_default_str();
  cal->add_option("--alpha", cal_opts.alpha, "Significance level for the global threshold")
      ->capture_default_str();
  cal->add_option("--percentile", cal_opts.percentile, "Class threshold percentile")
      ->capture_default_str();
  cal->add_option("--strategy", strings.normalization,
                  "Normalization: peak_amplitude|per_coefficient_mean")
      ->capture_default_str();
  cal->add_option("--tier", cal_opts.tier, "Word tier name")->capture_default_str();
  cal->add_option("--error-tier", cal_error_tier,
                  "Phone-error tier; words overlapped >50% of an error interval are "
                  "labeled incorrect");
  cal->add_option("--jobs", cal_opts.jobs, "Parallel utterances")->capture_default_str();
  cal->add_option("--frame-length", cal_opts.mfcc_config.frame_length, "MFCC frame (s)")
      ->capture_default_str();
  cal->add_option("--hop-length", cal_opts.mfcc_config.hop_length, "MFCC hop (s)")
      ->capture_default_str();

  // ---- detect ----
  auto* det = app.add_subcommand("detect", "Label each word of one utterance");
  pipeline::DetectOptions det_opts;
  std::string det_model, det_real_wav, det_real_grid;
  std::string det_clone_wav, det_clone_grid, det_endpoint, det_out;
  det->add_option("--model", det_model, "Calibration model JSON")->required();
  det->add_option("--real-wav", det_real_wav, "Speaker utterance WAV")->required();
  det->add_option("--real-textgrid", det_real_grid, "Word alignment for the utterance")
      ->required();
  det->add_option("--clone-wav", det_clone_wav, "Pre-synthesized clone WAV");
  det->add_option("--clone-textgrid", det_clone_grid, "Clone word alignment");
  det->add_option("--endpoint", det_endpoint, "Remote TTS endpoint URL");
  det->add_option("--decision", strings.decision, "Strategy: global|cdf-median|kde")
      ->capture_default_str();
  det->add_option("--tier", det_opts.tier, "Word tier name")->capture_default_str();
  det->add_option("--utterance-id", det_opts.utterance_id, "Id used in the report")
      ->capture_default_str();
  det->add_option("--voice-id", det_opts.voice_id, "Speaker voice id for remote synthesis");
  det->add_option("--timeout", det_opts.remote.timeout_s, "Remote timeout (s)")
      ->capture_default_str();
  det->add_option("--retries", det_opts.remote.retries, "Remote retry budget")
      ->capture_default_str();
  det->add_option("--out", det_out, "Write the verdict JSON here instead of stdout");

  // ---- evaluate ----
  auto* eva = app.add_subcommand(
      "evaluate", "Score detection against a labeled manifest (Table-1/2 style report)");
  pipeline::EvaluateOptions eva_opts;
  std::string eva_model, eva_manifest, eva_error_tier, eva_out;
  eva->add_option("--model", eva_model, "Calibration model JSON")->required();
  eva->add_option("--manifest", eva_manifest, "Labeled manifest JSON")->required();
  eva->add_option("--decision", strings.decision, "Strategy: global|cdf-median|kde")
      ->capture_default_str();
  eva->add_option("--ambiguous-as", strings.ambiguous_as,
                  "Map AMBIGUOUS verdicts for binary metrics: incorrect|correct|drop")
      ->capture_default_str();
  eva->add_option("--group-by", strings.group_by,
                  "Distance summary grouping: outcome|truth")
      ->capture_default_str();
  eva->add_option("--tier", eva_opts.tier, "Word tier name")->capture_default_str();
  eva->add_option("--error-tier", eva_error_tier, "Phone-error tier for truth labels");
  eva->add_option("--jobs", eva_opts.jobs, "Parallel utterances")->capture_default_str();
  std::string eva_format = "json";
  eva->add_option("--format", eva_format, "Payload form: json (full precision) or table (3 dp)")
      ->capture_default_str();
  eva->add_option("--out", eva_out, "Write the report JSON here instead of stdout");

  // ---- summarize ----
  auto* sum = app.add_subcommand(
      "summarize", "Distance-distribution summaries from an evaluation report");
  std::string sum_report, sum_out;
  sum->add_option("--report", sum_report, "Evaluation report JSON")->required();
  sum->add_option("--group-by", strings.group_by, "outcome|truth")->capture_default_str();
  sum->add_option("--ambiguous-as", strings.ambiguous_as, "incorrect|correct|drop")
      ->capture_default_str();
  std::string sum_format = "json";
  sum->add_option("--format", sum_format, "Payload form: json (full precision) or table (3 dp)")
      ->capture_default_str();
  sum->add_option("--out", sum_out, "Write the summary JSON here instead of stdout");

  // ---- stft ----
  auto* stft = app.add_subcommand(
      "stft", "Export an STFT magnitude matrix (dB) with a mean-magnitude column as CSV");
  std::string stft_wav, stft_out;
  double stft_frame = 0.025, stft_hop = 0.010;
  double stft_start = -1.0, stft_end = -1.0;
  stft->add_option("--wav", stft_wav, "Input WAV")->required();
  stft->add_option("--frame", stft_frame, "Frame length (s)")->capture_default_str();
  stft->add_option("--hop", stft_hop, "Hop length (s)")->capture_default_str();
  stft->add_option("--start", stft_start, "Slice start (s)");
  stft->add_option("--end", stft_end, "Slice end (s)");
  stft->add_option("--out", stft_out, "Write the CSV here instead of stdout");

  // ---- fixture ----
  auto* fix = app.add_subcommand(
      "fixture", "Generate a deterministic synthetic corpus (WAV pairs, TextGrids, manifest)");
  fixture::FixtureOptions fix_opts;
  std::string fix_dir = "fixture";
  fix->add_option("--seed", fix_opts.seed, "RNG seed")->capture_default_str();
  fix->add_option("--out-dir", fix_dir, "Output directory")->capture_default_str();
  fix->add_option("--utterances", fix_opts.n_utterances, "Utterance count")
      ->capture_default_str();
  fix->add_option("--words", fix_opts.words_per_utterance, "Words per utterance")
      ->capture_default_str();
  fix->add_option("--misp-rate", fix_opts.misp_rate, "Fraction of mispronounced words")
      ->capture_default_str();
  fix->add_option("--sample-rate", fix_opts.sample_rate, "WAV sample rate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    emit_diagnostic("error", "UsageError", e.what());
    return 1;
  }

  try {
    if (*cal) {
      cal_opts.manifest_path = cal_manifest;
      cal_opts.strategy = distance::strategy_from_string(strings.normalization);
      if (!cal_error_tier.empty()) cal_opts.error_tier = cal_error_tier;
      auto output = pipeline::run_calibrate(cal_opts);
      emit_warnings(output.warnings);
      calibration::save_model(output.model, cal_out);
      std::cout << output.summary.dump(2) << "\n";
    } else if (*det) {
      det_opts.model_path = det_model;
      det_opts.real_wav = det_real_wav;
      det_opts.real_textgrid = det_real_grid;
      if (!det_clone_wav.empty()) det_opts.clone_wav = det_clone_wav;
      if (!det_clone_grid.empty()) det_opts.clone_textgrid = det_clone_grid;
      if (!det_endpoint.empty()) det_opts.endpoint = det_endpoint;
      det_opts.decision = detector::decision_from_string(strings.decision);
      auto output = pipeline::run_detect(det_opts);
      emit_warnings(output.warnings);
      write_payload(output.report.dump(2) + "\n",
                    det_out.empty() ? std::nullopt : std::optional(det_out));
    } else if (*eva) {
      eva_opts.model_path = eva_model;
      eva_opts.manifest_path = eva_manifest;
      eva_opts.decision = detector::decision_from_string(strings.decision);
      eva_opts.ambiguous_as = pipeline::ambiguous_mapping_from_string(strings.ambiguous_as);
      eva_opts.group_by = pipeline::group_by_from_string(strings.group_by);
      if (!eva_error_tier.empty()) eva_opts.error_tier = eva_error_tier;
      auto output = pipeline::run_evaluate(eva_opts);
      emit_warnings(output.warnings);
      if (eva_format == "table") {
        write_payload(pipeline::report_to_table(output.report),
                      eva_out.empty() ? std::nullopt : std::optional(eva_out));
      } else if (eva_format == "json") {
        write_payload(output.report.dump(2) + "\n",
                      eva_out.empty() ? std::nullopt : std::optional(eva_out));
      } else {
        throw UsageError("--format must be json|table");
      }
    } else if (*sum) {
      const json report = read_json_file(sum_report);
      const json out = pipeline::summarize_report(
          report, pipeline::group_by_from_string(strings.group_by),
          pipeline::ambiguous_mapping_from_string(strings.ambiguous_as));
      if (sum_format == "table") {
        write_payload(pipeline::report_to_table(out),
                      sum_out.empty() ? std::nullopt : std::optional(sum_out));
      } else if (sum_format == "json") {
        write_payload(out.dump(2) + "\n",
                      sum_out.empty() ? std::nullopt : std::optional(sum_out));
      } else {
        throw UsageError("--format must be json|table");
      }
    } else if (*stft) {
      audio::AudioBuffer a =
          audio::resample(audio::load_wav(stft_wav), audio::kCanonicalRate);
      if (stft_start >= 0.0 && stft_end > stft_start)
        a = audio::slice(a, stft_start, stft_end);
      const auto m = metrics::stft_magnitude(a, stft_frame, stft_hop);
      if (stft_out.empty()) {
        metrics::write_stft_csv(m, std::cout);
      } else {
        std::ofstream out(stft_out, std::ios::binary);
        if (!out) throw UsageError("cannot write " + stft_out);
        metrics::write_stft_csv(m, out);
      }
    } else if (*fix) {
      fix_opts.out_dir = fix_dir;
      const auto summary = fixture::generate_fixture(fix_opts);
      json j;
      j["manifest"] = summary.manifest_path.generic_string();
      j["utterances"] = summary.manifest.entries.size();
      j["total_words"] = summary.total_words;
      j["incorrect_words"] = summary.incorrect_words;
      std::cout << j.dump(2) << "\n";
    }
  } catch (const Error& e) {
    emit_diagnostic("error", e.kind(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    emit_diagnostic("error", "InternalError", e.what());
    return 2;
  }
  return 0;
}
