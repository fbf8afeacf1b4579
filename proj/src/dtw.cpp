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

#include "prondiff/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prondiff/errors.hpp"

namespace prondiff::dtw {

namespace {

double column_distance(const mfcc::MfccMatrix& a, std::size_t p, const mfcc::MfccMatrix& b,
                       std::size_t q) {
  double acc = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(mfcc::kNumCoefficients); ++c) {
    const double d = a.at(c, p) - b.at(c, q);
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Shared DP skeleton; `cost(p, q)` supplies the cell cost.
template <typename CostFn>
std::vector<double> accumulate_costs(std::size_t m, std::size_t n, CostFn cost) {
  std::vector<double> acc(m * n);
  auto at = [&](std::size_t p, std::size_t q) -> double& { return acc[p * n + q]; };
  at(0, 0) = cost(0, 0);
  for (std::size_t q = 1; q < n; ++q) at(0, q) = at(0, q - 1) + cost(0, q);
  for (std::size_t p = 1; p < m; ++p) {
    at(p, 0) = at(p - 1, 0) + cost(p, 0);
    for (std::size_t q = 1; q < n; ++q) {
      const double best = std::min({at(p - 1, q - 1), at(p, q - 1), at(p - 1, q)});
      at(p, q) = best + cost(p, q);
    }
  }
  return acc;
}

WarpPath backtrace(const std::vector<double>& acc, std::size_t m, std::size_t n) {
  auto at = [&](std::size_t p, std::size_t q) { return acc[p * n + q]; };
  WarpPath path;
  std::size_t p = m - 1;
  std::size_t q = n - 1;
  path.steps.emplace_back(p, q);
  while (p != 0 || q != 0) {
    if (p == 0) {
      --q;
    } else if (q == 0) {
      --p;
    } else {
      const double diag = at(p - 1, q - 1);
      const double left = at(p, q - 1);
      const double up = at(p - 1, q);
      const double best = std::min({diag, left, up});
      if (diag == best) {
        --p;
        --q;
      } else if (left == best) {
        --q;
      } else {
        --p;
      }
    }
    path.steps.emplace_back(p, q);
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

}  // namespace

DtwResult dtw_joint(const mfcc::MfccMatrix& a, const mfcc::MfccMatrix& b, bool with_path) {
  const std::size_t m = a.frames();
  const std::size_t n = b.frames();
  if (m == 0 || n == 0) throw EmptyMatrix("dtw_joint requires at least one frame per side");

  const auto acc = accumulate_costs(
      m, n, [&](std::size_t p, std::size_t q) { return column_distance(a, p, b, q); });

  DtwResult result;
  result.distance = acc[m * n - 1];
  if (with_path) result.path = backtrace(acc, m, n);
  return result;
}

double dtw_scalar(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw EmptyMatrix("dtw_scalar requires non-empty series");
  const auto acc = accumulate_costs(
      a.size(), b.size(), [&](std::size_t p, std::size_t q) { return std::abs(a[p] - b[q]); });
  return acc[a.size() * b.size() - 1];
}

mfcc::MfccMatrix resample_matrix(const mfcc::MfccMatrix& m, std::size_t t_hat) {
  const std::size_t t = m.frames();
  if (t == 0) throw EmptyMatrix("cannot resample an empty matrix");
  if (t_hat == 0) throw EmptyMatrix("target frame count must be positive");
  if (t_hat == t) return m;

  mfcc::MfccMatrix out;
  out.coeffs.assign(static_cast<std::size_t>(mfcc::kNumCoefficients) * t_hat, 0.0);
  out.frame_times.resize(t_hat);
  const double t0 = m.frame_times.front();
  const double t1 = m.frame_times.back();
  for (std::size_t j = 0; j < t_hat; ++j) {
    const double pos = t_hat == 1 ? 0.0
                                  : static_cast<double>(j) * static_cast<double>(t - 1) /
                                        static_cast<double>(t_hat - 1);
    const auto i0 = static_cast<std::size_t>(std::floor(pos));
    const std::size_t i1 = std::min(i0 + 1, t - 1);
    const double frac = pos - static_cast<double>(i0);
    for (std::size_t c = 0; c < static_cast<std::size_t>(mfcc::kNumCoefficients); ++c)
      out.at(c, j) = (1.0 - frac) * m.at(c, i0) + frac * m.at(c, i1);
    out.frame_times[j] =
        t_hat == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(t_hat - 1);
  }
  return out;
}

PerCoefficientResult dtw_per_coefficient(const mfcc::MfccMatrix& a, const mfcc::MfccMatrix& b) {
  if (a.frames() == 0 || b.frames() == 0)
    throw EmptyMatrix("dtw_per_coefficient requires at least one frame per side");
  PerCoefficientResult result;
  result.t_hat = std::max(a.frames(), b.frames());
  const mfcc::MfccMatrix ra = resample_matrix(a, result.t_hat);
  const mfcc::MfccMatrix rb = resample_matrix(b, result.t_hat);

  std::vector<double> series_a(result.t_hat);
  std::vector<double> series_b(result.t_hat);
  for (std::size_t c = 0; c < static_cast<std::size_t>(mfcc::kNumCoefficients); ++c) {
    for (std::size_t t = 0; t < result.t_hat; ++t) {
      series_a[t] = ra.at(c, t);
      series_b[t] = rb.at(c, t);
    }
    result.distances[c] = dtw_scalar(series_a, series_b);
  }
  return result;
}

}  // namespace prondiff::dtw
