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

#include "prondiff/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "prondiff/calibration.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/fft.hpp"

namespace prondiff::metrics {

namespace {

constexpr double kPi = 3.14159265358979323846;

double safe_ratio(long num, long den, const std::string& what,
                  std::vector<std::string>* notes) {
  if (den == 0) {
    if (notes) notes->push_back(what + " undefined (zero denominator); reported as 0");
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
}

}  // namespace

ConfusionMatrix confusion_matrix(const std::vector<std::pair<PoolLabel, PoolLabel>>& pred_true) {
  ConfusionMatrix cm;
  for (const auto& [pred, truth] : pred_true) {
    const bool p = pred == PoolLabel::Incorrect;
    const bool t = truth == PoolLabel::Incorrect;
    if (p && t)
      ++cm.tp;
    else if (p && !t)
      ++cm.fp;
    else if (!p && !t)
      ++cm.tn;
    else
      ++cm.fn;
  }
  return cm;
}

ClassReport classification_report(const std::vector<std::pair<PoolLabel, PoolLabel>>& pred_true) {
  if (pred_true.empty()) throw EmptyInput("classification_report needs at least one pair");
  return classification_report(confusion_matrix(pred_true));
}

ClassReport classification_report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyInput("classification_report on empty confusion matrix");
  ClassReport report;
  report.total = cm.total();

  ClassMetrics c0;
  c0.label = "0";
  c0.support = cm.tn + cm.fp;
  c0.precision = safe_ratio(cm.tn, cm.tn + cm.fn, "class 0 precision", &report.notes);
  c0.recall = safe_ratio(cm.tn, c0.support, "class 0 recall", &report.notes);

  ClassMetrics c1;
  c1.label = "1";
  c1.support = cm.tp + cm.fn;
  c1.precision = safe_ratio(cm.tp, cm.tp + cm.fp, "class 1 precision", &report.notes);
  c1.recall = safe_ratio(cm.tp, c1.support, "class 1 recall", &report.notes);

  for (ClassMetrics* c : {&c0, &c1}) {
    const double pr = c->precision + c->recall;
    c->f1 = pr > 0.0 ? 2.0 * c->precision * c->recall / pr : 0.0;
  }

  report.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(report.total);
  report.classes = {std::move(c0), std::move(c1)};
  return report;
}

std::string_view to_string(SummaryOutcome o) {
  return o == SummaryOutcome::CorrectClassified ? "correct-classified" : "incorrect-classified";
}

std::vector<DistanceSummary> distance_summary(
    const std::vector<std::pair<double, SummaryOutcome>>& distances) {
  std::vector<DistanceSummary> out;
  for (SummaryOutcome outcome :
       {SummaryOutcome::CorrectClassified, SummaryOutcome::IncorrectClassified}) {
    std::vector<double> values;
    for (const auto& [d, o] : distances)
      if (o == outcome) values.push_back(d);
    if (values.empty()) continue;  // group omitted; caller warns

    DistanceSummary s;
    s.outcome = outcome;
    s.count = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());  // population std
    s.mean = mean;
    s.std_dev = std::sqrt(var);

    const auto pool = calibration::make_pool(values);
    s.median = calibration::percentile_threshold(pool, 50.0);
    s.q25 = calibration::percentile_threshold(pool, 25.0);
    s.q75 = calibration::percentile_threshold(pool, 75.0);
    out.push_back(s);
  }
  return out;
}

StftMatrix stft_magnitude(const audio::AudioBuffer& a, double frame_s, double hop_s) {
  const auto frame_samples = static_cast<std::size_t>(std::lround(frame_s * a.sample_rate));
  const auto hop_samples = static_cast<std::size_t>(std::lround(hop_s * a.sample_rate));
  if (frame_samples == 0 || hop_samples == 0)
    throw InvalidConfig("frame and hop must be at least one sample");
  if (a.samples.size() < frame_samples)
    throw BufferTooShort("buffer shorter than one STFT frame");

  const std::size_t fft_size = dsp::next_power_of_two(frame_samples);
  const std::size_t frames = 1 + (a.samples.size() - frame_samples) / hop_samples;

  StftMatrix m;
  m.frames = frames;
  m.bins = fft_size / 2 + 1;
  m.bin_hz = static_cast<double>(a.sample_rate) / static_cast<double>(fft_size);
  m.db.assign(frames * m.bins, 0.0);
  m.mean_mag.resize(frames);
  m.frame_times.resize(frames);

  std::vector<double> window(frame_samples);
  for (std::size_t i = 0; i < frame_samples; ++i)
    window[i] = frame_samples == 1
                    ? 1.0
                    : 0.5 - 0.5 * std::cos(2.0 * kPi * i / (frame_samples - 1));

  std::vector<double> linear(frames * m.bins);
  double max_mag = 0.0;
  std::vector<double> frame(frame_samples);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * hop_samples;
    for (std::size_t i = 0; i < frame_samples; ++i)
      frame[i] = a.samples[offset + i] * window[i];
    const auto mags = dsp::magnitude_spectrum(frame, fft_size);
    double mean = 0.0;
    for (std::size_t k = 0; k < m.bins; ++k) {
      linear[t * m.bins + k] = mags[k];
      mean += mags[k];
      max_mag = std::max(max_mag, mags[k]);
    }
    m.mean_mag[t] = mean / static_cast<double>(m.bins);
    m.frame_times[t] =
        (static_cast<double>(offset) + frame_samples / 2.0) / a.sample_rate;
  }

  for (std::size_t i = 0; i < linear.size(); ++i) {
    // All-silent input has no reference level; clamp everything to the floor.
    if (max_mag <= 0.0 || linear[i] <= 0.0) {
      m.db[i] = -80.0;
    } else {
      m.db[i] = std::clamp(20.0 * std::log10(linear[i] / max_mag), -80.0, 0.0);
    }
  }
  return m;
}

void write_stft_csv(const StftMatrix& m, std::ostream& out) {
  std::string line = "time_s";
  for (std::size_t k = 0; k < m.bins; ++k) {
    line += ",db_hz_";
    append_number(line, static_cast<double>(k) * m.bin_hz);
  }
  line += ",mean_mag\n";
  out << line;
  for (std::size_t t = 0; t < m.frames; ++t) {
    line.clear();
    append_number(line, m.frame_times[t]);
    for (std::size_t k = 0; k < m.bins; ++k) {
      line += ',';
      append_number(line, m.at(t, k));
    }
    line += ',';
    append_number(line, m.mean_mag[t]);
    line += '\n';
    out << line;
  }
}

}  // namespace prondiff::metrics
