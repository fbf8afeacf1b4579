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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "prondiff/audio.hpp"
#include "prondiff/calibration.hpp"
#include "prondiff/detector.hpp"
#include "prondiff/distance.hpp"
#include "prondiff/dtw.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/fixture.hpp"
#include "prondiff/metrics.hpp"
#include "prondiff/mfcc.hpp"
#include "prondiff/pipeline.hpp"
#include "prondiff/textgrid.hpp"

namespace py = pybind11;
using namespace prondiff;

namespace {

py::array_t<double> matrix_to_numpy(const mfcc::MfccMatrix& m) {
  const auto rows = static_cast<py::ssize_t>(mfcc::kNumCoefficients);
  const auto cols = static_cast<py::ssize_t>(m.frames());
  py::array_t<double> out({rows, cols});
  auto buf = out.mutable_unchecked<2>();
  for (py::ssize_t c = 0; c < rows; ++c)
    for (py::ssize_t t = 0; t < cols; ++t)
      buf(c, t) = m.at(static_cast<std::size_t>(c), static_cast<std::size_t>(t));
  return out;
}

mfcc::MfccMatrix matrix_from_numpy(const py::array_t<double>& arr) {
  if (arr.ndim() != 2 || arr.shape(0) != mfcc::kNumCoefficients)
    throw UsageError("expected a (13, T) array");
  mfcc::MfccMatrix m;
  const auto cols = static_cast<std::size_t>(arr.shape(1));
  m.frame_times.resize(cols);
  for (std::size_t t = 0; t < cols; ++t) m.frame_times[t] = 0.01 * static_cast<double>(t);
  m.coeffs.resize(static_cast<std::size_t>(mfcc::kNumCoefficients) * cols);
  auto buf = arr.unchecked<2>();
  for (py::ssize_t c = 0; c < arr.shape(0); ++c)
    for (py::ssize_t t = 0; t < arr.shape(1); ++t)
      m.at(static_cast<std::size_t>(c), static_cast<std::size_t>(t)) = buf(c, t);
  return m;
}

calibration::DistancePool pool_from_list(const std::vector<double>& values) {
  return calibration::make_pool(values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Word-level mispronunciation detection via voice-clone comparison";

  py::register_exception<Error>(m, "ProndiffError");

  // ---- types ----
  py::enum_<PoolLabel>(m, "PoolLabel")
      .value("CORRECT", PoolLabel::Correct)
      .value("INCORRECT", PoolLabel::Incorrect);

  py::enum_<distance::NormalizationStrategy>(m, "NormalizationStrategy")
      .value("PEAK_AMPLITUDE", distance::NormalizationStrategy::PeakAmplitude)
      .value("PER_COEFFICIENT_MEAN", distance::NormalizationStrategy::PerCoefficientMean);

  py::enum_<detector::DecisionStrategy>(m, "DecisionStrategy")
      .value("GLOBAL_THRESHOLD", detector::DecisionStrategy::GlobalThreshold)
      .value("CDF_MEDIAN", detector::DecisionStrategy::CdfMedian)
      .value("KDE", detector::DecisionStrategy::Kde);

  py::enum_<detector::VerdictLabel>(m, "VerdictLabel")
      .value("CORRECT", detector::VerdictLabel::Correct)
      .value("INCORRECT", detector::VerdictLabel::Incorrect)
      .value("AMBIGUOUS", detector::VerdictLabel::Ambiguous);

  // ---- audio ----
  py::class_<audio::AudioBuffer>(m, "AudioBuffer")
      .def(py::init([](const std::vector<double>& samples, int sample_rate) {
             return audio::AudioBuffer{samples, sample_rate};
           }),
           py::arg("samples"), py::arg("sample_rate") = audio::kCanonicalRate)
      .def_readonly("sample_rate", &audio::AudioBuffer::sample_rate)
      .def_property_readonly("samples",
                             [](const audio::AudioBuffer& a) {
                               return py::array_t<double>(
                                   static_cast<py::ssize_t>(a.samples.size()),
                                   a.samples.data());
                             })
      .def_property_readonly("duration", &audio::AudioBuffer::duration)
      .def("__len__", [](const audio::AudioBuffer& a) { return a.samples.size(); });

  m.def("load_wav", &audio::load_wav, py::arg("path"));
  m.def("save_wav_pcm16", &audio::save_wav_pcm16, py::arg("audio"), py::arg("path"));
  m.def(
      "decode_wav",
      [](py::bytes data) {
        const std::string s = data;
        return audio::decode_wav(std::vector<std::uint8_t>(s.begin(), s.end()));
      },
      py::arg("data"));
  m.def("peak_amplitude", &audio::peak_amplitude, py::arg("audio"));
  m.def("slice", &audio::slice, py::arg("audio"), py::arg("start_s"), py::arg("end_s"));
  m.def("resample", &audio::resample, py::arg("audio"), py::arg("target_rate"));

  // ---- textgrid ----
  py::class_<textgrid::Interval>(m, "Interval")
      .def_readonly("start", &textgrid::Interval::start)
      .def_readonly("end", &textgrid::Interval::end)
      .def_readonly("label", &textgrid::Interval::label);

  py::class_<textgrid::IntervalTier>(m, "IntervalTier")
      .def_readonly("name", &textgrid::IntervalTier::name)
      .def_readonly("intervals", &textgrid::IntervalTier::intervals);

  py::class_<textgrid::TextGrid>(m, "TextGrid")
      .def_readonly("xmin", &textgrid::TextGrid::xmin)
      .def_readonly("xmax", &textgrid::TextGrid::xmax)
      .def_readonly("tiers", &textgrid::TextGrid::tiers);

  py::class_<textgrid::WordAlignment>(m, "WordAlignment")
      .def_readonly("word", &textgrid::WordAlignment::word)
      .def_readonly("real_start", &textgrid::WordAlignment::real_start)
      .def_readonly("real_end", &textgrid::WordAlignment::real_end)
      .def_readonly("clone_start", &textgrid::WordAlignment::clone_start)
      .def_readonly("clone_end", &textgrid::WordAlignment::clone_end)
      .def_readonly("index", &textgrid::WordAlignment::index);

  m.def("parse_textgrid", [](py::bytes content) {
    const std::string s = content;
    return textgrid::parse_textgrid(s);
  });
  m.def("parse_textgrid", [](const std::string& content) {
    return textgrid::parse_textgrid(content);
  });
  m.def("load_textgrid", &textgrid::load_textgrid, py::arg("path"));
  m.def("serialize_textgrid", &textgrid::serialize_textgrid, py::arg("grid"));
  m.def("extract_word_alignments", &textgrid::extract_word_alignments, py::arg("real"),
        py::arg("clone"), py::arg("tier_name") = "words");

  // ---- mfcc ----
  py::class_<mfcc::MfccConfig>(m, "MfccConfig")
      .def(py::init<>())
      .def_readwrite("frame_length", &mfcc::MfccConfig::frame_length)
      .def_readwrite("hop_length", &mfcc::MfccConfig::hop_length)
      .def_readwrite("mel_filter_count", &mfcc::MfccConfig::mel_filter_count)
      .def_readwrite("fft_size", &mfcc::MfccConfig::fft_size)
      .def_readwrite("pre_emphasis", &mfcc::MfccConfig::pre_emphasis)
      .def_readwrite("include_c0", &mfcc::MfccConfig::include_c0)
      .def_readwrite("lifter", &mfcc::MfccConfig::lifter);

  py::class_<mfcc::MfccMatrix>(m, "MfccMatrix")
      .def_property_readonly("coeffs", &matrix_to_numpy)
      .def_property_readonly("frame_times",
                             [](const mfcc::MfccMatrix& mm) {
                               return py::array_t<double>(
                                   static_cast<py::ssize_t>(mm.frame_times.size()),
                                   mm.frame_times.data());
                             })
      .def_property_readonly("frames", &mfcc::MfccMatrix::frames);

  m.def("default_config", &mfcc::default_config);
  m.def("extract_mfcc", &mfcc::extract_mfcc, py::arg("audio"), py::arg("config"));
  m.def("mfcc_matrix_from_numpy", &matrix_from_numpy, py::arg("array"),
        "Wrap a (13, T) array as an MfccMatrix (for synthetic DTW inputs)");

  // ---- dtw ----
  py::class_<dtw::WarpPath>(m, "WarpPath").def_readonly("steps", &dtw::WarpPath::steps);
  py::class_<dtw::DtwResult>(m, "DtwResult")
      .def_readonly("distance", &dtw::DtwResult::distance)
      .def_readonly("path", &dtw::DtwResult::path);

  m.def("dtw_joint", &dtw::dtw_joint, py::arg("a"), py::arg("b"),
        py::arg("with_path") = false);
  m.def(
      "dtw_per_coefficient",
      [](const mfcc::MfccMatrix& a, const mfcc::MfccMatrix& b) {
        const auto r = dtw::dtw_per_coefficient(a, b);
        return py::make_tuple(std::vector<double>(r.distances.begin(), r.distances.end()),
                              r.t_hat);
      },
      py::arg("a"), py::arg("b"));
  m.def("dtw_scalar", &dtw::dtw_scalar, py::arg("a"), py::arg("b"));

  // ---- distance ----
  py::class_<distance::WordDistance>(m, "WordDistance")
      .def_readonly("word", &distance::WordDistance::word)
      .def_readonly("index", &distance::WordDistance::index)
      .def_readonly("d_dtw", &distance::WordDistance::d_dtw)
      .def_readonly("d_bar", &distance::WordDistance::d_bar);

  m.def("word_distance", &distance::word_distance, py::arg("real_span"),
        py::arg("clone_span"), py::arg("utterance_peak"), py::arg("config"),
        py::arg("strategy"), py::arg("word") = std::string{}, py::arg("index") = -1);

  // ---- calibration ----
  py::class_<calibration::CalibrationModel>(m, "CalibrationModel")
      .def_readonly("alpha", &calibration::CalibrationModel::alpha)
      .def_readonly("percentile", &calibration::CalibrationModel::percentile)
      .def_readonly("tau_global", &calibration::CalibrationModel::tau_global)
      .def_readonly("tau_correct", &calibration::CalibrationModel::tau_correct)
      .def_readonly("tau_incorrect", &calibration::CalibrationModel::tau_incorrect)
      .def_readonly("kde_bandwidth_correct",
                    &calibration::CalibrationModel::kde_bandwidth_correct)
      .def_readonly("kde_bandwidth_incorrect",
                    &calibration::CalibrationModel::kde_bandwidth_incorrect)
      .def_property_readonly("pool_correct",
                             [](const calibration::CalibrationModel& mod) {
                               return mod.pool_correct.values;
                             })
      .def_property_readonly("pool_incorrect",
                             [](const calibration::CalibrationModel& mod) {
                               return mod.pool_incorrect.values;
                             });

  m.def(
      "order_statistic_threshold",
      [](const std::vector<double>& pool, double alpha) {
        return calibration::order_statistic_threshold(pool_from_list(pool), alpha);
      },
      py::arg("pool"), py::arg("alpha"));
  m.def(
      "percentile_threshold",
      [](const std::vector<double>& pool, double percent) {
        return calibration::percentile_threshold(pool_from_list(pool), percent);
      },
      py::arg("pool"), py::arg("percent"));
  m.def(
      "empirical_cdf",
      [](const std::vector<double>& pool, double x) {
        return calibration::empirical_cdf(pool_from_list(pool), x);
      },
      py::arg("pool"), py::arg("x"));
  m.def(
      "kde_fit",
      [](const std::vector<double>& pool) { return calibration::kde_fit(pool_from_list(pool)); },
      py::arg("pool"));
  m.def(
      "kde_density",
      [](const std::vector<double>& pool, double bandwidth, double x) {
        return calibration::kde_density(pool_from_list(pool), bandwidth, x);
      },
      py::arg("pool"), py::arg("bandwidth"), py::arg("x"));
  m.def(
      "calibrate",
      [](const std::vector<double>& d_bars, const std::vector<PoolLabel>& labels, double alpha,
         double percentile) {
        if (d_bars.size() != labels.size())
          throw UsageError("d_bars and labels must have equal length");
        std::vector<std::pair<distance::WordDistance, PoolLabel>> labeled;
        labeled.reserve(d_bars.size());
        for (std::size_t i = 0; i < d_bars.size(); ++i) {
          distance::WordDistance wd;
          wd.d_bar = d_bars[i];
          wd.d_dtw = d_bars[i];
          labeled.emplace_back(wd, labels[i]);
        }
        return calibration::calibrate(labeled, alpha, percentile);
      },
      py::arg("d_bars"), py::arg("labels"), py::arg("alpha") = 0.1,
      py::arg("percentile") = 90.0);
  m.def("save_model", &calibration::save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &calibration::load_model, py::arg("path"));
  m.def("model_to_json", &calibration::model_to_json, py::arg("model"));

  // ---- detector ----
  py::class_<detector::WordVerdict>(m, "WordVerdict")
      .def_readonly("word", &detector::WordVerdict::word)
      .def_readonly("index", &detector::WordVerdict::index)
      .def_readonly("d_bar", &detector::WordVerdict::d_bar)
      .def_readonly("selected_distribution", &detector::WordVerdict::selected_distribution)
      .def_readonly("label", &detector::WordVerdict::label)
      .def_readonly("p_correct", &detector::WordVerdict::p_correct)
      .def_readonly("p_incorrect", &detector::WordVerdict::p_incorrect);

  m.def("decide_global", &detector::decide_global, py::arg("d_bar"), py::arg("model"));
  m.def("decide_cdf_median", &detector::decide_cdf_median, py::arg("d_bar"), py::arg("model"));
  m.def("decide_kde", &detector::decide_kde, py::arg("d_bar"), py::arg("model"));

  // ---- metrics ----
  py::class_<metrics::ClassMetrics>(m, "ClassMetrics")
      .def_readonly("label", &metrics::ClassMetrics::label)
      .def_readonly("precision", &metrics::ClassMetrics::precision)
      .def_readonly("recall", &metrics::ClassMetrics::recall)
      .def_readonly("f1", &metrics::ClassMetrics::f1)
      .def_readonly("support", &metrics::ClassMetrics::support);

  py::class_<metrics::ClassReport>(m, "ClassReport")
      .def_readonly("classes", &metrics::ClassReport::classes)
      .def_readonly("accuracy", &metrics::ClassReport::accuracy)
      .def_readonly("total", &metrics::ClassReport::total)
      .def_readonly("notes", &metrics::ClassReport::notes);

  m.def(
      "classification_report",
      [](const std::vector<std::pair<PoolLabel, PoolLabel>>& pred_true) {
        return metrics::classification_report(pred_true);
      },
      py::arg("pred_true"));

  py::enum_<metrics::SummaryOutcome>(m, "SummaryOutcome")
      .value("CORRECT_CLASSIFIED", metrics::SummaryOutcome::CorrectClassified)
      .value("INCORRECT_CLASSIFIED", metrics::SummaryOutcome::IncorrectClassified);

  py::class_<metrics::DistanceSummary>(m, "DistanceSummary")
      .def_readonly("outcome", &metrics::DistanceSummary::outcome)
      .def_readonly("count", &metrics::DistanceSummary::count)
      .def_readonly("mean", &metrics::DistanceSummary::mean)
      .def_readonly("median", &metrics::DistanceSummary::median)
      .def_readonly("std_dev", &metrics::DistanceSummary::std_dev)
      .def_readonly("q25", &metrics::DistanceSummary::q25)
      .def_readonly("q75", &metrics::DistanceSummary::q75);

  m.def("distance_summary", &metrics::distance_summary, py::arg("distances"));

  py::class_<metrics::StftMatrix>(m, "StftMatrix")
      .def_readonly("frames", &metrics::StftMatrix::frames)
      .def_readonly("bins", &metrics::StftMatrix::bins)
      .def_readonly("bin_hz", &metrics::StftMatrix::bin_hz)
      .def_property_readonly("db",
                             [](const metrics::StftMatrix& s) {
                               py::array_t<double> out(
                                   {static_cast<py::ssize_t>(s.frames),
                                    static_cast<py::ssize_t>(s.bins)});
                               auto buf = out.mutable_unchecked<2>();
                               for (std::size_t t = 0; t < s.frames; ++t)
                                 for (std::size_t k = 0; k < s.bins; ++k)
                                   buf(static_cast<py::ssize_t>(t),
                                       static_cast<py::ssize_t>(k)) = s.at(t, k);
                               return out;
                             })
      .def_readonly("mean_mag", &metrics::StftMatrix::mean_mag)
      .def_readonly("frame_times", &metrics::StftMatrix::frame_times);

  m.def("stft_magnitude", &metrics::stft_magnitude, py::arg("audio"), py::arg("frame_s"),
        py::arg("hop_s"));
  m.def(
      "stft_csv",
      [](const metrics::StftMatrix& s) {
        std::ostringstream ss;
        metrics::write_stft_csv(s, ss);
        return ss.str();
      },
      py::arg("stft"));

  // ---- fixture + pipeline ----
  py::class_<fixture::FixtureOptions>(m, "FixtureOptions")
      .def(py::init<>())
      .def_readwrite("seed", &fixture::FixtureOptions::seed)
      .def_readwrite("out_dir", &fixture::FixtureOptions::out_dir)
      .def_readwrite("n_utterances", &fixture::FixtureOptions::n_utterances)
      .def_readwrite("words_per_utterance", &fixture::FixtureOptions::words_per_utterance)
      .def_readwrite("misp_rate", &fixture::FixtureOptions::misp_rate)
      .def_readwrite("sample_rate", &fixture::FixtureOptions::sample_rate);

  m.def(
      "generate_fixture",
      [](const fixture::FixtureOptions& options) {
        const auto summary = fixture::generate_fixture(options);
        py::dict d;
        d["manifest_path"] = summary.manifest_path.generic_string();
        d["total_words"] = summary.total_words;
        d["incorrect_words"] = summary.incorrect_words;
        return d;
      },
      py::arg("options"));

  m.def(
      "run_calibrate_json",
      [](const std::filesystem::path& manifest_path, double alpha, double percentile,
         const std::string& strategy, const std::filesystem::path& model_out, int jobs) {
        pipeline::CalibrateOptions opt;
        opt.manifest_path = manifest_path;
        opt.alpha = alpha;
        opt.percentile = percentile;
        opt.strategy = distance::strategy_from_string(strategy);
        opt.jobs = jobs;
        auto out = pipeline::run_calibrate(opt);
        calibration::save_model(out.model, model_out);
        return out.summary.dump();
      },
      py::arg("manifest"), py::arg("alpha"), py::arg("percentile"), py::arg("strategy"),
      py::arg("model_out"), py::arg("jobs") = 1);

  m.def(
      "run_evaluate_json",
      [](const std::filesystem::path& model_path, const std::filesystem::path& manifest_path,
         const std::string& decision, const std::string& ambiguous_as, int jobs) {
        pipeline::EvaluateOptions opt;
        opt.model_path = model_path;
        opt.manifest_path = manifest_path;
        opt.decision = detector::decision_from_string(decision);
        opt.ambiguous_as = pipeline::ambiguous_mapping_from_string(ambiguous_as);
        opt.jobs = jobs;
        return pipeline::run_evaluate(opt).report.dump();
      },
      py::arg("model"), py::arg("manifest"), py::arg("decision") = "cdf-median",
      py::arg("ambiguous_as") = "incorrect", py::arg("jobs") = 1);
}
