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

#include "prondiff/mfcc.hpp"

#include <cmath>

#include "prondiff/errors.hpp"
#include "prondiff/fft.hpp"

namespace prondiff::mfcc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters on the HTK mel scale, expressed as per-bin weights over
// the one-sided power spectrum. Bin edges follow the usual
// floor((nfft + 1) * hz / sr) mapping.
std::vector<std::vector<double>> build_filterbank(int mel_filter_count, int fft_size,
                                                  int sample_rate) {
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  const int n_points = mel_filter_count + 2;
  std::vector<int> bins(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (n_points - 1);
    bins[static_cast<std::size_t>(i)] = static_cast<int>(
        std::floor((fft_size + 1) * mel_to_hz(mel) / sample_rate));
  }

  const std::size_t n_bins = static_cast<std::size_t>(fft_size) / 2 + 1;
  std::vector<std::vector<double>> filters(static_cast<std::size_t>(mel_filter_count),
                                           std::vector<double>(n_bins, 0.0));
  for (int f = 0; f < mel_filter_count; ++f) {
    const int left = bins[static_cast<std::size_t>(f)];
    const int center = bins[static_cast<std::size_t>(f + 1)];
    const int right = bins[static_cast<std::size_t>(f + 2)];
    auto& w = filters[static_cast<std::size_t>(f)];
    for (int k = left; k < center; ++k)
      w[static_cast<std::size_t>(k)] = static_cast<double>(k - left) / (center - left);
    for (int k = center; k < right; ++k)
      w[static_cast<std::size_t>(k)] = static_cast<double>(right - k) / (right - center);
    if (center == left && center == right && center >= 0 &&
        static_cast<std::size_t>(center) < n_bins) {
      // Degenerate filter (very narrow band at low rates): pass its one bin.
      w[static_cast<std::size_t>(center)] = 1.0;
    }
  }
  return filters;
}

// Orthonormal DCT-II rows for the requested cepstral indices.
std::vector<std::vector<double>> build_dct(const std::vector<int>& cepstral_indices,
                                           int mel_filter_count) {
  const double m = static_cast<double>(mel_filter_count);
  std::vector<std::vector<double>> rows;
  rows.reserve(cepstral_indices.size());
  for (int k : cepstral_indices) {
    std::vector<double> row(static_cast<std::size_t>(mel_filter_count));
    const double scale = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int j = 0; j < mel_filter_count; ++j)
      row[static_cast<std::size_t>(j)] = scale * std::cos(kPi * k * (j + 0.5) / m);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

MfccConfig default_config() { return MfccConfig{}; }

void validate_config(const MfccConfig& cfg, int sample_rate) {
  if (!(cfg.hop_length > 0.0) || cfg.frame_length < cfg.hop_length)
    throw InvalidConfig("require frame_length >= hop_length > 0");
  if (cfg.mel_filter_count < kNumCoefficients)
    throw InvalidConfig("mel_filter_count must be >= 13");
  if (!dsp::is_power_of_two(static_cast<std::size_t>(cfg.fft_size)))
    throw InvalidConfig("fft_size must be a power of two");
  const auto frame_samples = static_cast<long>(std::lround(cfg.frame_length * sample_rate));
  if (cfg.fft_size < frame_samples)
    throw InvalidConfig("fft_size smaller than frame length in samples");
  if (cfg.pre_emphasis < 0.0 || cfg.pre_emphasis >= 1.0)
    throw InvalidConfig("pre_emphasis must lie in [0, 1)");
  if (cfg.lifter < 0) throw InvalidConfig("lifter must be >= 0");
}

std::vector<double> MfccMatrix::column(std::size_t frame) const {
  std::vector<double> col(kNumCoefficients);
  for (std::size_t c = 0; c < kNumCoefficients; ++c) col[c] = at(c, frame);
  return col;
}

MfccMatrix extract_mfcc(const audio::AudioBuffer& a, const MfccConfig& cfg) {
  validate_config(cfg, a.sample_rate);

  const auto frame_samples = static_cast<std::size_t>(std::lround(cfg.frame_length * a.sample_rate));
  const auto hop_samples = static_cast<std::size_t>(std::lround(cfg.hop_length * a.sample_rate));
  const std::size_t n = a.samples.size();
  if (n < frame_samples)
    throw BufferTooShort("span of " + std::to_string(n) + " samples is shorter than one frame (" +
                         std::to_string(frame_samples) + " samples)");
  const std::size_t frames = 1 + (n - frame_samples) / hop_samples;

  // Pre-emphasis over the whole span; x[-1] is mirrored so a constant signal
  // stays constant.
  std::vector<double> emphasized(n);
  emphasized[0] = a.samples[0] - cfg.pre_emphasis * a.samples[0];
  for (std::size_t i = 1; i < n; ++i)
    emphasized[i] = a.samples[i] - cfg.pre_emphasis * a.samples[i - 1];

  std::vector<double> window(frame_samples);
  for (std::size_t i = 0; i < frame_samples; ++i)
    window[i] = frame_samples == 1
                    ? 1.0
                    : 0.54 - 0.46 * std::cos(2.0 * kPi * i / (frame_samples - 1));

  const auto filters = build_filterbank(cfg.mel_filter_count, cfg.fft_size, a.sample_rate);

  std::vector<int> kept(kNumCoefficients);
  for (int i = 0; i < kNumCoefficients; ++i) kept[static_cast<std::size_t>(i)] = cfg.include_c0 ? i : i + 1;
  const auto dct_rows = build_dct(kept, cfg.mel_filter_count);

  std::vector<double> lifter_gain(kNumCoefficients, 1.0);
  if (cfg.lifter > 0) {
    for (int i = 0; i < kNumCoefficients; ++i)
      lifter_gain[static_cast<std::size_t>(i)] =
          1.0 + (cfg.lifter / 2.0) * std::sin(kPi * kept[static_cast<std::size_t>(i)] / cfg.lifter);
  }

  MfccMatrix out;
  out.coeffs.assign(static_cast<std::size_t>(kNumCoefficients) * frames, 0.0);
  out.frame_times.resize(frames);

  std::vector<double> frame(frame_samples);
  std::vector<double> log_energies(static_cast<std::size_t>(cfg.mel_filter_count));
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * hop_samples;
    for (std::size_t i = 0; i < frame_samples; ++i)
      frame[i] = emphasized[offset + i] * window[i];

    const auto power = dsp::power_spectrum(frame, static_cast<std::size_t>(cfg.fft_size));
    for (int f = 0; f < cfg.mel_filter_count; ++f) {
      const auto& w = filters[static_cast<std::size_t>(f)];
      double e = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) e += w[k] * power[k];
      log_energies[static_cast<std::size_t>(f)] = std::log(std::max(e, kLogFloor));
    }

    for (std::size_t c = 0; c < kNumCoefficients; ++c) {
      const auto& row = dct_rows[c];
      double acc = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * log_energies[j];
      out.at(c, t) = acc * lifter_gain[c];
    }
    out.frame_times[t] =
        (static_cast<double>(offset) + frame_samples / 2.0) / a.sample_rate;
  }
  return out;
}

}  // namespace prondiff::mfcc
