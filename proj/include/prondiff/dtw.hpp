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

#ifndef PRONDIFF_DTW_HPP
#define PRONDIFF_DTW_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "prondiff/mfcc.hpp"

namespace prondiff::dtw {

/// Monotone boundary-respecting alignment path. Indices are 0-based; the
/// first step is (0,0), the last (m-1,n-1), and consecutive deltas are in
/// {(1,0),(0,1),(1,1)}.
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;
};

struct DtwResult {
  double distance = 0.0;
  std::optional<WarpPath> path;
};

/// Classic O(mn) dynamic program over 13-dim frame columns with Euclidean
/// cell cost. The backtraced path breaks ties deterministically: diagonal
/// first, then (0,1), then (1,0).
DtwResult dtw_joint(const mfcc::MfccMatrix& a, const mfcc::MfccMatrix& b,
                    bool with_path = false);

/// Scalar DTW (absolute-difference cost) between two equal-length series.
double dtw_scalar(const std::vector<double>& a, const std::vector<double>& b);

/// Linear interpolation of each coefficient trajectory to t_hat frames.
/// Endpoints map to endpoints; a single-frame matrix replicates its column.
mfcc::MfccMatrix resample_matrix(const mfcc::MfccMatrix& m, std::size_t t_hat);

struct PerCoefficientResult {
  std::array<double, mfcc::kNumCoefficients> distances{};
  std::size_t t_hat = 0;
};

/// Resample both envelopes to T_hat = max(T_a, T_b) frames, then run scalar
/// DTW per coefficient.
PerCoefficientResult dtw_per_coefficient(const mfcc::MfccMatrix& a, const mfcc::MfccMatrix& b);

}  // namespace prondiff::dtw

#endif  // PRONDIFF_DTW_HPP
