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

#ifndef PRONDIFF_MFCC_HPP
#define PRONDIFF_MFCC_HPP

#include <cstddef>
#include <vector>

#include "prondiff/audio.hpp"

namespace prondiff::mfcc {

inline constexpr int kNumCoefficients = 13;

/// Front-end parameters. The pipeline is pre-emphasis -> Hamming window ->
/// |FFT|^2 -> HTK-mel triangular filterbank -> floored log -> orthonormal
/// DCT-II, keeping 13 coefficients.
struct MfccConfig {
  double frame_length = 0.025;  // seconds
  double hop_length = 0.010;    // seconds
  int mel_filter_count = 26;
  int fft_size = 512;           // power of two, >= frame samples
  double pre_emphasis = 0.97;   // in [0, 1)
  bool include_c0 = true;       // c0..c12 when true, c1..c13 otherwise
  int lifter = 0;               // sinusoidal liftering length, 0 = none

  friend bool operator==(const MfccConfig&, const MfccConfig&) = default;
};

/// Frame 25 ms / hop 10 ms / 26 mel filters / FFT 512 at 16 kHz /
/// pre-emphasis 0.97 / c0 kept / no lifter.
MfccConfig default_config();

/// 13 x T cepstral matrix, coefficient-major (row c is one coefficient's
/// trajectory). frame_times holds the T frame-center timestamps.
struct MfccMatrix {
  std::vector<double> coeffs;       // kNumCoefficients * frames, row-major
  std::vector<double> frame_times;  // seconds

  std::size_t frames() const { return frame_times.size(); }
  double at(std::size_t coef, std::size_t frame) const {
    return coeffs[coef * frames() + frame];
  }
  double& at(std::size_t coef, std::size_t frame) { return coeffs[coef * frames() + frame]; }
  std::vector<double> column(std::size_t frame) const;
};

/// Extract the 13-dimensional MFCC envelope of a span. The frame count is
/// T = 1 + floor((N - frame_samples) / hop_samples); a span shorter than one
/// frame throws BufferTooShort. Mel energies are clamped at 1e-10 before the
/// log, so all outputs are finite even for silence.
MfccMatrix extract_mfcc(const audio::AudioBuffer& a, const MfccConfig& cfg);

/// The log-floor constant: extract_mfcc never sees a mel energy below this.
inline constexpr double kLogFloor = 1e-10;

void validate_config(const MfccConfig& cfg, int sample_rate);

}  // namespace prondiff::mfcc

#endif  // PRONDIFF_MFCC_HPP
