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

#include "prondiff/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <unordered_set>

#include "prondiff/distance.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/metrics.hpp"

namespace prondiff::pipeline {

namespace {

using nlohmann::json;

// Run fn(i) for i in [0, n) on up to `jobs` threads; the first failure (by
// lowest index, for determinism) is rethrown on the caller's thread.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

audio::AudioBuffer load_canonical(const std::filesystem::path& wav) {
  return audio::resample(audio::load_wav(wav), audio::kCanonicalRate);
}

// Clone spans when no clone grid exists: scale each real span by the clone
// to real duration ratio. Coarse on purpose; flagged low-fidelity upstream.
std::vector<textgrid::WordAlignment> proportional_alignments(const textgrid::TextGrid& real_grid,
                                                             const std::string& tier,
                                                             double real_duration,
                                                             double clone_duration) {
  const auto words = textgrid::word_intervals(real_grid, tier);
  std::vector<textgrid::WordAlignment> out;
  out.reserve(words.size());
  const double ratio = real_duration > 0.0 ? clone_duration / real_duration : 0.0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    textgrid::WordAlignment wa;
    wa.word = words[k].label;
    wa.real_start = words[k].start;
    wa.real_end = words[k].end;
    wa.clone_start = words[k].start * ratio;
    wa.clone_end = words[k].end * ratio;
    wa.index = k;
    out.push_back(std::move(wa));
  }
  return out;
}

void apply_labels(LoadedUtterance& lu, const manifest::ManifestEntry& entry,
                  const textgrid::TextGrid& real_grid,
                  const std::optional<std::string>& error_tier) {
  lu.pair.labels.assign(lu.pair.alignments.size(), std::nullopt);
  for (const auto& wl : entry.word_labels) {
    if (wl.index < 0 || static_cast<std::size_t>(wl.index) >= lu.pair.alignments.size())
      throw MalformedManifest("utterance '" + entry.utterance_id + "': labeled index " +
                              std::to_string(wl.index) + " outside its " +
                              std::to_string(lu.pair.alignments.size()) + " words");
    lu.pair.labels[static_cast<std::size_t>(wl.index)] = wl.label;
  }

  if (!error_tier) return;
  const auto tier_it =
      std::find_if(real_grid.tiers.begin(), real_grid.tiers.end(), [&](const auto& t) {
        std::string a = t.name, b = *error_tier;
        std::transform(a.begin(), a.end(), a.begin(), ::tolower);
        std::transform(b.begin(), b.end(), b.begin(), ::tolower);
        return a == b;
      });
  if (tier_it == real_grid.tiers.end()) {
    lu.warnings.push_back("utterance '" + entry.utterance_id + "': error tier '" + *error_tier +
                          "' not present; overlap labeling skipped");
    return;
  }
  for (std::size_t idx : textgrid::words_overlapping_errors(lu.pair.alignments, *tier_it))
    lu.pair.labels[idx] = PoolLabel::Incorrect;
}

}  // namespace

AmbiguousMapping ambiguous_mapping_from_string(std::string_view s) {
  if (s == "incorrect") return AmbiguousMapping::Incorrect;
  if (s == "correct") return AmbiguousMapping::Correct;
  if (s == "drop") return AmbiguousMapping::Drop;
  throw UsageError("--ambiguous-as must be incorrect|correct|drop");
}

std::string_view to_string(AmbiguousMapping m) {
  switch (m) {
    case AmbiguousMapping::Incorrect:
      return "incorrect";
    case AmbiguousMapping::Correct:
      return "correct";
    case AmbiguousMapping::Drop:
      return "drop";
  }
  return "incorrect";
}

SummaryGroupBy group_by_from_string(std::string_view s) {
  if (s == "outcome") return SummaryGroupBy::Outcome;
  if (s == "truth") return SummaryGroupBy::Truth;
  throw UsageError("--group-by must be outcome|truth");
}

std::string_view to_string(SummaryGroupBy g) {
  return g == SummaryGroupBy::Outcome ? "outcome" : "truth";
}

LoadedUtterance load_utterance(const manifest::ManifestEntry& entry, const std::string& tier,
                               const std::optional<std::string>& error_tier) {
  LoadedUtterance lu;
  lu.pair.id = entry.utterance_id;
  lu.pair.real_audio = load_canonical(entry.real_wav);
  const textgrid::TextGrid real_grid = textgrid::load_textgrid(entry.real_textgrid);

  std::optional<textgrid::TextGrid> clone_grid;
  if (entry.clone_textgrid) clone_grid = textgrid::load_textgrid(*entry.clone_textgrid);
  if (entry.clone_wav) {
    lu.pair.clone_audio = load_canonical(*entry.clone_wav);
  } else {
    // Fall back to the <id>_clone.* local-store convention beside the files.
    clone_provider::CloneRequest req;
    req.utterance_id = entry.utterance_id;
    auto result = clone_provider::fetch_clone_local(entry.real_wav.parent_path(), req);
    lu.pair.clone_audio = std::move(result.audio);
    if (!clone_grid) clone_grid = std::move(result.alignment);
  }

  if (clone_grid) {
    lu.pair.alignments = textgrid::extract_word_alignments(real_grid, *clone_grid, tier);
  } else {
    lu.pair.alignments = proportional_alignments(real_grid, tier, lu.pair.real_audio.duration(),
                                                 lu.pair.clone_audio.duration());
    lu.low_fidelity_alignment = true;
    lu.warnings.push_back("utterance '" + entry.utterance_id +
                          "': no clone TextGrid; proportional span mapping in use (LOW-FIDELITY)");
  }

  apply_labels(lu, entry, real_grid, error_tier);
  return lu;
}

CalibrateOutput run_calibrate(const CalibrateOptions& options) {
  const manifest::Manifest mf = manifest::load_manifest(options.manifest_path);
  if (mf.entries.empty()) throw MalformedManifest("manifest has no entries");

  struct PerUtterance {
    std::vector<std::pair<distance::WordDistance, PoolLabel>> labeled;
    std::vector<std::string> warnings;
  };
  std::vector<PerUtterance> partial(mf.entries.size());

  parallel_for(mf.entries.size(), options.jobs, [&](std::size_t i) {
    const auto& entry = mf.entries[i];
    LoadedUtterance lu = load_utterance(entry, options.tier, options.error_tier);
    PerUtterance& out = partial[i];
    out.warnings = std::move(lu.warnings);

    const double peak = audio::peak_amplitude(lu.pair.real_audio);
    for (std::size_t k = 0; k < lu.pair.alignments.size(); ++k) {
      const auto& wa = lu.pair.alignments[k];
      if (!lu.pair.labels[k]) {
        out.warnings.push_back("utterance '" + entry.utterance_id + "': word '" + wa.word +
                               "' (index " + std::to_string(wa.index) +
                               ") has no ground-truth label; excluded from pools");
        continue;
      }
      try {
        auto wd = distance::word_distance(
            audio::slice(lu.pair.real_audio, wa.real_start, wa.real_end),
            audio::slice(lu.pair.clone_audio, wa.clone_start, wa.clone_end), peak,
            options.mfcc_config, options.strategy, wa.word, static_cast<int>(wa.index));
        out.labeled.emplace_back(std::move(wd), *lu.pair.labels[k]);
      } catch (const BufferTooShort& e) {
        out.warnings.push_back("utterance '" + entry.utterance_id + "': word '" + wa.word +
                               "' (index " + std::to_string(wa.index) + ") skipped: " + e.what());
      }
    }
  });

  CalibrateOutput output;
  std::vector<std::pair<distance::WordDistance, PoolLabel>> labeled;
  for (auto& p : partial) {
    std::move(p.labeled.begin(), p.labeled.end(), std::back_inserter(labeled));
    std::move(p.warnings.begin(), p.warnings.end(), std::back_inserter(output.warnings));
  }
  if (labeled.empty()) throw EmptyPool("empty calibration pools: manifest yielded no labeled words");

  output.model = calibration::calibrate(labeled, options.alpha, options.percentile,
                                        &output.warnings);
  output.model.strategy = options.strategy;
  output.model.mfcc_config = options.mfcc_config;
  for (const auto& e : mf.entries) output.model.utterance_ids.push_back(e.utterance_id);

  json summary;
  summary["pool_sizes"] = {{"correct", output.model.pool_correct.size()},
                           {"incorrect", output.model.pool_incorrect.size()}};
  summary["tau_global"] = output.model.tau_global;
  summary["tau_correct"] =
      output.model.tau_correct ? json(*output.model.tau_correct) : json(nullptr);
  summary["tau_incorrect"] =
      output.model.tau_incorrect ? json(*output.model.tau_incorrect) : json(nullptr);
  summary["alpha"] = options.alpha;
  summary["percentile"] = options.percentile;
  summary["strategy"] = std::string(distance::to_string(options.strategy));
  output.summary = std::move(summary);
  return output;
}

namespace {

json verdict_to_json(const detector::WordVerdict& v) {
  json w;
  w["word"] = v.word;
  w["index"] = v.index;
  w["d_bar"] = v.d_bar;
  w["label"] = std::string(detector::to_string(v.label));
  w["selected_distribution"] =
      v.selected_distribution ? json(std::string(to_string(*v.selected_distribution)))
                              : json(nullptr);
  w["p_correct"] = v.p_correct ? json(*v.p_correct) : json(nullptr);
  w["p_incorrect"] = v.p_incorrect ? json(*v.p_incorrect) : json(nullptr);
  return w;
}

std::optional<PoolLabel> map_verdict(detector::VerdictLabel label, AmbiguousMapping mapping) {
  switch (label) {
    case detector::VerdictLabel::Correct:
      return PoolLabel::Correct;
    case detector::VerdictLabel::Incorrect:
      return PoolLabel::Incorrect;
    case detector::VerdictLabel::Ambiguous:
      switch (mapping) {
        case AmbiguousMapping::Incorrect:
          return PoolLabel::Incorrect;
        case AmbiguousMapping::Correct:
          return PoolLabel::Correct;
        case AmbiguousMapping::Drop:
          return std::nullopt;
      }
  }
  return std::nullopt;
}

}  // namespace

DetectOutput run_detect(const DetectOptions& options) {
  const calibration::CalibrationModel model = calibration::load_model(options.model_path);

  DetectOutput output;
  LoadedUtterance lu;
  lu.pair.id = options.utterance_id;
  lu.pair.real_audio = load_canonical(options.real_wav);
  const textgrid::TextGrid real_grid = textgrid::load_textgrid(options.real_textgrid);

  std::optional<textgrid::TextGrid> clone_grid;
  if (options.clone_textgrid) clone_grid = textgrid::load_textgrid(*options.clone_textgrid);
  if (options.clone_wav) {
    lu.pair.clone_audio = load_canonical(*options.clone_wav);
  } else if (options.endpoint) {
    clone_provider::CloneRequest req;
    req.utterance_id = options.utterance_id;
    req.speaker_voice_id = options.voice_id;
    // The corrected-pronunciation rendition is synthesized from the words of
    // the utterance itself.
    for (const auto& iv : textgrid::word_intervals(real_grid, options.tier)) {
      if (!req.transcript.empty()) req.transcript += ' ';
      req.transcript += iv.label;
    }
    req.audio = lu.pair.real_audio;
    auto result = clone_provider::fetch_clone_remote(*options.endpoint, req, options.remote);
    lu.pair.clone_audio = std::move(result.audio);
    if (!clone_grid) clone_grid = std::move(result.alignment);
    if (result.retries_used > 0)
      output.warnings.push_back("remote clone fetch needed " +
                                std::to_string(result.retries_used) + " retries");
  } else {
    clone_provider::CloneRequest req;
    req.utterance_id = options.utterance_id;
    auto result = clone_provider::fetch_clone_local(options.real_wav.parent_path(), req);
    lu.pair.clone_audio = std::move(result.audio);
    if (!clone_grid) clone_grid = std::move(result.alignment);
  }

  if (clone_grid) {
    lu.pair.alignments = textgrid::extract_word_alignments(real_grid, *clone_grid, options.tier);
  } else {
    lu.pair.alignments =
        proportional_alignments(real_grid, options.tier, lu.pair.real_audio.duration(),
                                lu.pair.clone_audio.duration());
    lu.low_fidelity_alignment = true;
    output.warnings.push_back(
        "no clone TextGrid; proportional span mapping in use (LOW-FIDELITY)");
  }

  detector::DetectionResult det = detector::detect_utterance(lu.pair, model, options.decision);
  std::move(det.warnings.begin(), det.warnings.end(), std::back_inserter(output.warnings));

  json report;
  report["version"] = 1;
  report["utterance_id"] = options.utterance_id;
  report["strategy"] = std::string(detector::to_string(options.decision));
  report["normalization"] = std::string(distance::to_string(model.strategy));
  report["low_fidelity_alignment"] = lu.low_fidelity_alignment;
  json words = json::array();
  for (const auto& v : det.verdicts) words.push_back(verdict_to_json(v));
  report["words"] = std::move(words);
  report["warnings"] = output.warnings;
  output.report = std::move(report);
  return output;
}

EvaluateOutput run_evaluate(const EvaluateOptions& options) {
  const calibration::CalibrationModel model = calibration::load_model(options.model_path);
  const manifest::Manifest mf = manifest::load_manifest(options.manifest_path);
  if (mf.entries.empty()) throw MalformedManifest("manifest has no entries");

  EvaluateOutput output;

  // Train/test hygiene: warn when evaluation ids intersect the calibration set.
  {
    std::unordered_set<std::string> train(model.utterance_ids.begin(),
                                          model.utterance_ids.end());
    std::vector<std::string> overlap;
    for (const auto& e : mf.entries)
      if (train.count(e.utterance_id)) overlap.push_back(e.utterance_id);
    if (!overlap.empty()) {
      std::string msg = "train/test overlap: " + std::to_string(overlap.size()) +
                        " utterance ids also appear in the calibration manifest (";
      for (std::size_t i = 0; i < std::min<std::size_t>(overlap.size(), 3); ++i)
        msg += (i ? ", " : "") + overlap[i];
      if (overlap.size() > 3) msg += ", ...";
      output.warnings.push_back(msg + ")");
    }
  }

  struct PerUtterance {
    std::vector<detector::WordVerdict> verdicts;
    std::vector<std::optional<PoolLabel>> truths;  // parallel to verdicts
    std::vector<std::string> warnings;
  };
  std::vector<PerUtterance> partial(mf.entries.size());

  parallel_for(mf.entries.size(), options.jobs, [&](std::size_t i) {
    const auto& entry = mf.entries[i];
    LoadedUtterance lu = load_utterance(entry, options.tier, options.error_tier);
    PerUtterance& out = partial[i];
    out.warnings = std::move(lu.warnings);

    detector::DetectionResult det =
        detector::detect_utterance(lu.pair, model, options.decision);
    std::move(det.warnings.begin(), det.warnings.end(), std::back_inserter(out.warnings));
    for (auto& v : det.verdicts) {
      const auto idx = static_cast<std::size_t>(v.index);
      out.truths.push_back(lu.pair.labels[idx]);
      out.verdicts.push_back(std::move(v));
    }
  });

  json words = json::array();
  std::vector<std::pair<PoolLabel, PoolLabel>> pred_true;
  std::vector<std::pair<double, metrics::SummaryOutcome>> grouped;
  long n_correct = 0;
  long n_incorrect = 0;
  long n_ambiguous = 0;

  for (std::size_t i = 0; i < mf.entries.size(); ++i) {
    PerUtterance& p = partial[i];
    std::move(p.warnings.begin(), p.warnings.end(), std::back_inserter(output.warnings));
    for (std::size_t k = 0; k < p.verdicts.size(); ++k) {
      const auto& v = p.verdicts[k];
      switch (v.label) {
        case detector::VerdictLabel::Correct:
          ++n_correct;
          break;
        case detector::VerdictLabel::Incorrect:
          ++n_incorrect;
          break;
        case detector::VerdictLabel::Ambiguous:
          ++n_ambiguous;
          break;
      }
      json w = verdict_to_json(v);
      w["utterance_id"] = mf.entries[i].utterance_id;
      const auto truth = p.truths[k];
      w["truth"] = truth ? json(std::string(to_string(*truth))) : json(nullptr);
      words.push_back(std::move(w));

      if (!truth) {
        output.warnings.push_back("utterance '" + mf.entries[i].utterance_id + "': word '" +
                                  v.word + "' (index " + std::to_string(v.index) +
                                  ") has no ground-truth label; excluded from metrics");
        continue;
      }
      const auto mapped = map_verdict(v.label, options.ambiguous_as);
      if (!mapped) continue;  // dropped ambiguous verdict
      pred_true.emplace_back(*mapped, *truth);
      const bool group_correct = options.group_by == SummaryGroupBy::Outcome
                                     ? *mapped == *truth
                                     : *truth == PoolLabel::Correct;
      grouped.emplace_back(v.d_bar, group_correct ? metrics::SummaryOutcome::CorrectClassified
                                                  : metrics::SummaryOutcome::IncorrectClassified);
    }
  }

  if (pred_true.empty())
    throw EmptyInput("no labeled words to evaluate (check manifest word_labels)");

  const metrics::ClassReport report = metrics::classification_report(pred_true);
  const auto summaries = metrics::distance_summary(grouped);
  for (auto outcome :
       {metrics::SummaryOutcome::CorrectClassified, metrics::SummaryOutcome::IncorrectClassified}) {
    if (std::none_of(summaries.begin(), summaries.end(),
                     [&](const auto& s) { return s.outcome == outcome; }))
      output.warnings.push_back("distance summary group '" +
                                std::string(metrics::to_string(outcome)) + "' is empty; omitted");
  }

  json j;
  j["version"] = 1;
  j["speaker"] = mf.speaker;
  j["strategy"] = std::string(detector::to_string(options.decision));
  j["normalization"] = std::string(distance::to_string(model.strategy));
  j["ambiguous_as"] = std::string(to_string(options.ambiguous_as));
  j["group_by"] = std::string(to_string(options.group_by));
  j["counts"] = {{"correct", n_correct}, {"incorrect", n_incorrect}, {"ambiguous", n_ambiguous}};
  json classes = json::array();
  for (const auto& c : report.classes)
    classes.push_back(json{{"label", c.label},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support}});
  j["classes"] = std::move(classes);
  j["accuracy"] = report.accuracy;
  json sums = json::array();
  for (const auto& s : summaries)
    sums.push_back(json{{"outcome", std::string(metrics::to_string(s.outcome))},
                        {"count", s.count},
                        {"mean", s.mean},
                        {"median", s.median},
                        {"std", s.std_dev},
                        {"q25", s.q25},
                        {"q75", s.q75}});
  j["distance_summaries"] = std::move(sums);
  j["std_convention"] = "population";
  j["words"] = std::move(words);
  for (const auto& note : report.notes) output.warnings.push_back(note);
  j["warnings"] = output.warnings;
  output.report = std::move(j);
  return output;
}

std::string report_to_table(const json& report) {
  std::string out;
  char line[160];
  if (report.contains("classes")) {
    out += "class  precision  recall  f1     support\n";
    for (const auto& c : report.at("classes")) {
      std::snprintf(line, sizeof(line), "%-5s  %9.3f  %6.3f  %5.3f  %7ld\n",
                    c.at("label").get<std::string>().c_str(),
                    c.at("precision").get<double>(), c.at("recall").get<double>(),
                    c.at("f1").get<double>(), c.at("support").get<long>());
      out += line;
    }
    std::snprintf(line, sizeof(line), "accuracy %.3f\n", report.at("accuracy").get<double>());
    out += line;
  }
  if (report.contains("counts")) {
    const auto& counts = report.at("counts");
    std::snprintf(line, sizeof(line), "verdicts: correct %ld, incorrect %ld, ambiguous %ld\n",
                  counts.at("correct").get<long>(), counts.at("incorrect").get<long>(),
                  counts.at("ambiguous").get<long>());
    out += line;
  }
  if (report.contains("distance_summaries")) {
    out += "\noutcome                count  mean    median  std     q25     q75\n";
    for (const auto& s : report.at("distance_summaries")) {
      std::snprintf(line, sizeof(line), "%-21s  %5zu  %6.3f  %6.3f  %6.3f  %6.3f  %6.3f\n",
                    s.at("outcome").get<std::string>().c_str(),
                    s.at("count").get<std::size_t>(), s.at("mean").get<double>(),
                    s.at("median").get<double>(), s.at("std").get<double>(),
                    s.at("q25").get<double>(), s.at("q75").get<double>());
      out += line;
    }
  }
  return out;
}

json summarize_report(const json& report, SummaryGroupBy group_by,
                      AmbiguousMapping ambiguous_as) {
  if (!report.contains("words") || !report["words"].is_array())
    throw UsageError("report has no 'words' array; run evaluate first");

  std::vector<std::pair<double, metrics::SummaryOutcome>> grouped;
  for (const auto& w : report["words"]) {
    if (!w.contains("truth") || w["truth"].is_null()) continue;
    const PoolLabel truth = pool_label_from_string(w["truth"].get<std::string>());
    const std::string label = w.at("label").get<std::string>();
    std::optional<PoolLabel> mapped;
    if (label == "CORRECT")
      mapped = PoolLabel::Correct;
    else if (label == "INCORRECT")
      mapped = PoolLabel::Incorrect;
    else
      mapped = map_verdict(detector::VerdictLabel::Ambiguous, ambiguous_as);
    if (!mapped) continue;
    const bool group_correct =
        group_by == SummaryGroupBy::Outcome ? *mapped == truth : truth == PoolLabel::Correct;
    grouped.emplace_back(w.at("d_bar").get<double>(),
                         group_correct ? metrics::SummaryOutcome::CorrectClassified
                                       : metrics::SummaryOutcome::IncorrectClassified);
  }
  if (grouped.empty()) throw EmptyInput("report contains no labeled words to summarize");

  json out;
  out["group_by"] = std::string(to_string(group_by));
  out["ambiguous_as"] = std::string(to_string(ambiguous_as));
  out["std_convention"] = "population";
  json sums = json::array();
  for (const auto& s : metrics::distance_summary(grouped))
    sums.push_back(json{{"outcome", std::string(metrics::to_string(s.outcome))},
                        {"count", s.count},
                        {"mean", s.mean},
                        {"median", s.median},
                        {"std", s.std_dev},
                        {"q25", s.q25},
                        {"q75", s.q75}});
  out["distance_summaries"] = std::move(sums);
  return out;
}

}  // namespace prondiff::pipeline
