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

#ifndef PRONDIFF_FFT_HPP
#define PRONDIFF_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace prondiff::dsp {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n);

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a);

/// Power spectrum |X_k|^2 for k = 0..fft_size/2 of a real frame zero-padded
/// to fft_size (power of two, >= frame.size()).
std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t fft_size);

/// Magnitude spectrum |X_k| for k = 0..fft_size/2.
std::vector<double> magnitude_spectrum(const std::vector<double>& frame, std::size_t fft_size);

}  // namespace prondiff::dsp

#endif  // PRONDIFF_FFT_HPP
