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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prondiff/calibration.hpp"
#include "prondiff/errors.hpp"

using namespace prondiff;
using calibration::DistancePool;

namespace {

DistancePool pool_of(std::vector<double> v) { return calibration::make_pool(std::move(v)); }

std::vector<double> seeded_pool(std::mt19937& rng, std::size_t n, double lo = 0.0,
                                double hi = 3.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = oracles::range(rng, lo, hi);
  return v;
}

std::vector<std::pair<distance::WordDistance, PoolLabel>> labeled_from(
    const std::vector<double>& correct, const std::vector<double>& incorrect) {
  std::vector<std::pair<distance::WordDistance, PoolLabel>> out;
  for (double d : correct) {
    distance::WordDistance wd;
    wd.d_bar = d;
    out.emplace_back(wd, PoolLabel::Correct);
  }
  for (double d : incorrect) {
    distance::WordDistance wd;
    wd.d_bar = d;
    out.emplace_back(wd, PoolLabel::Incorrect);
  }
  return out;
}

std::vector<double> grid(double lo, double step, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + step * i);
  return v;
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("order statistic threshold on 1..10 at alpha 0.1") {
  CHECK(calibration::order_statistic_threshold(
            pool_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 0.1) == 10.0);
}

TEST_CASE("singleton pool clamps to its only value") {
  for (double alpha : {0.01, 0.5, 0.99})
    CHECK(calibration::order_statistic_threshold(pool_of({5.0}), alpha) == 5.0);
}

TEST_CASE("order statistic matches the sort-and-index oracle exactly") {
  std::mt19937 rng(77);
  const auto values = seeded_pool(rng, 1000);
  const DistancePool pool = pool_of(values);
  for (double alpha : {0.05, 0.1, 0.25}) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    auto q = static_cast<long>(std::ceil((n + 1.0) * (1.0 - alpha)));
    q = std::clamp<long>(q, 1, static_cast<long>(sorted.size()));
    CHECK(calibration::order_statistic_threshold(pool, alpha) ==
          sorted[static_cast<std::size_t>(q - 1)]);
  }
}

TEST_CASE("coverage guarantee holds by counting") {
  std::mt19937 rng(88);
  for (int iter = 0; iter < 100; ++iter) {
    const auto values = seeded_pool(rng, 5 + rng() % 200);
    const DistancePool pool = pool_of(values);
    for (double alpha : {0.05, 0.1, 0.2}) {
      const double tau = calibration::order_statistic_threshold(pool, alpha);
      CHECK(oracles::counting_cdf(values, tau) >= 1.0 - alpha);
    }
  }
}

TEST_CASE("percentile threshold: step-CDF evaluation on 1..10") {
  const DistancePool pool = pool_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(calibration::percentile_threshold(pool, 90.0) == 9.0);
  CHECK(calibration::percentile_threshold(pool, 100.0) == 10.0);
  CHECK(calibration::percentile_threshold(pool, 10.0) == 1.0);
}

TEST_CASE("percentile threshold equals the inf-scan oracle, duplicates included") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 30; ++iter) {
    auto values = seeded_pool(rng, 3 + rng() % 60, 0.0, 1.0);
    // Inject duplicates.
    for (std::size_t i = 0; i + 1 < values.size(); i += 3) values[i + 1] = values[i];
    const DistancePool pool = pool_of(values);
    for (double p : {10.0, 25.0, 50.0, 75.0, 90.0, 99.0, 100.0})
      CHECK(calibration::percentile_threshold(pool, p) == oracles::scan_percentile(values, p));
  }
}

TEST_CASE("percentile_threshold(pool, 90) is the inf of {x : F(x) >= 0.9}") {
  std::mt19937 rng(51);
  const auto values = seeded_pool(rng, 200);
  const DistancePool pool = pool_of(values);
  const double tau = calibration::percentile_threshold(pool, 90.0);
  CHECK(calibration::empirical_cdf(pool, tau) >= 0.9);
  // No smaller pool value reaches 0.9.
  for (double v : pool.values) {
    if (v < tau) CHECK(calibration::empirical_cdf(pool, v) < 0.9);
  }
}

TEST_CASE("empirical CDF basics and boundaries") {
  const DistancePool pool = pool_of({1, 2, 3, 4});
  CHECK(calibration::empirical_cdf(pool, 2.5) == 0.5);
  CHECK(calibration::empirical_cdf(pool, 0.5) == 0.0);
  CHECK(calibration::empirical_cdf(pool, 4.0) == 1.0);
  CHECK(calibration::empirical_cdf(pool, 99.0) == 1.0);
}

TEST_CASE("empirical CDF equals the counting oracle on 10000 queries") {
  std::mt19937 rng(101);
  const auto values = seeded_pool(rng, 500);
  const DistancePool pool = pool_of(values);
  for (int i = 0; i < 10000; ++i) {
    const double x = oracles::range(rng, -0.5, 3.5);
    CHECK(calibration::empirical_cdf(pool, x) == oracles::counting_cdf(values, x));
  }
}

TEST_CASE("CDF laws: non-decreasing step function with F(max) = 1") {
  std::mt19937 rng(102);
  const auto values = seeded_pool(rng, 64);
  const DistancePool pool = pool_of(values);
  double prev = 0.0;
  for (double x = -0.1; x <= 3.2; x += 0.01) {
    const double f = calibration::empirical_cdf(pool, x);
    CHECK(f >= prev);
    prev = f;
  }
  const double max_v = *std::max_element(values.begin(), values.end());
  CHECK(calibration::empirical_cdf(pool, max_v) == 1.0);
  // Right-continuity at a pool value: F includes the value itself.
  const double v = pool.values[10];
  CHECK(calibration::empirical_cdf(pool, v) > calibration::empirical_cdf(pool, v - 1e-12));
}

TEST_CASE("kde_fit rejects degenerate pools") {
  CHECK_THROWS_AS(calibration::kde_fit(pool_of({0.5})), DegeneratePool);
  CHECK_THROWS_AS(calibration::kde_fit(pool_of({1.0, 1.0, 1.0})), DegeneratePool);
}

TEST_CASE("kde_fit survives IQR collapse when variance is nonzero") {
  const double h = calibration::kde_fit(pool_of({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0}));
  CHECK(h > 0.0);
}

TEST_CASE("single kernel at its center has density 1/sqrt(2*pi)") {
  CHECK(calibration::kde_density(pool_of({0.0}), 1.0, 0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
}

TEST_CASE("KDE is symmetric for a symmetric pool") {
  const DistancePool pool = pool_of({1.0, 2.0, 3.0, 4.0, 5.0});  // symmetric about 3
  const double h = calibration::kde_fit(pool);
  for (double dx : {0.1, 0.7, 1.3, 2.9})
    CHECK(calibration::kde_density(pool, h, 3.0 - dx) ==
          doctest::Approx(calibration::kde_density(pool, h, 3.0 + dx)).epsilon(1e-12));
}

TEST_CASE("KDE integrates to one (trapezoid quadrature)") {
  std::mt19937 rng(103);
  const auto values = seeded_pool(rng, 40, 0.2, 1.4);
  const DistancePool pool = pool_of(values);
  const double h = calibration::kde_fit(pool);
  const double lo = pool.values.front() - 5.0 * h;
  const double hi = pool.values.back() + 5.0 * h;
  const double integral = oracles::trapezoid_integral(
      [&](double x) { return calibration::kde_density(pool, h, x); }, lo, hi, 100000);
  CHECK(integral >= 0.999);
  CHECK(integral <= 1.001);
}

TEST_CASE("KDE density is positive across the working range") {
  // Gaussian tails underflow to 0.0 beyond ~38 kernel widths; positivity is
  // asserted over the range detection actually queries.
  const DistancePool pool = pool_of({0.5, 0.6, 0.9});
  const double h = calibration::kde_fit(pool);
  for (double x : {-1.0, 0.0, 0.7, 2.0, 3.0})
    CHECK(calibration::kde_density(pool, h, x) > 0.0);
}

TEST_CASE("calibrate on uniform grids reproduces the arithmetic example") {
  const auto labeled = labeled_from(grid(0.1, 0.1, 10), grid(1.1, 0.1, 10));
  const auto model = calibration::calibrate(labeled, 0.1, 90.0);
  CHECK(model.tau_correct.value() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(model.tau_incorrect.value() == doctest::Approx(1.9).epsilon(1e-12));
  // Pooled order statistic: q = ceil(21 * 0.9) = 19 -> 19th of 20 values.
  CHECK(model.tau_global == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(model.pool_correct.size() == 10);
  CHECK(model.pool_incorrect.size() == 10);
  CHECK(model.class_strategies_enabled());
  CHECK(model.kde_enabled());
}

TEST_CASE("all-correct input disables class strategies but keeps tau_global") {
  std::vector<std::string> warnings;
  const auto model = calibration::calibrate(labeled_from(grid(0.1, 0.1, 10), {}), 0.1, 90.0,
                                            &warnings);
  CHECK(model.tau_global == 1.0);
  CHECK(!model.tau_incorrect.has_value());
  CHECK(!model.class_strategies_enabled());
  CHECK(!model.kde_enabled());
  CHECK(!warnings.empty());
}

TEST_CASE("empty input throws EmptyPool") {
  CHECK_THROWS_AS(calibration::calibrate({}, 0.1, 90.0), EmptyPool);
}

TEST_CASE("synthetic pools shaped like the published EBVS summary calibrate cleanly") {
  // Moments from the published distance table: correct mean 0.3467 / std
  // 0.0981, incorrect mean 0.3785 / std 0.0928 (Box-Muller from raw draws).
  std::mt19937 rng(2024);
  auto gauss = [&](double mu, double sigma) {
    const double u1 = std::max(oracles::unit(rng), 1e-12);
    const double u2 = oracles::unit(rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return std::max(0.0, mu + sigma * z);
  };
  // Large samples keep the 90th-percentile gap (~0.025) well above the
  // percentile sampling noise.
  std::vector<double> correct(1100);
  std::vector<double> incorrect(1330);
  for (auto& v : correct) v = gauss(0.3467, 0.0981);
  for (auto& v : incorrect) v = gauss(0.3785, 0.0928);
  const auto model = calibration::calibrate(labeled_from(correct, incorrect), 0.1, 90.0);
  CHECK(model.tau_correct.value() < model.tau_incorrect.value());
  CHECK(model.kde_enabled());
}

TEST_CASE("thresholds never decrease when adding a value above them") {
  std::mt19937 rng(104);
  for (int iter = 0; iter < 30; ++iter) {
    auto values = seeded_pool(rng, 10 + rng() % 50);
    const DistancePool pool = pool_of(values);
    const double tau_o = calibration::order_statistic_threshold(pool, 0.1);
    const double tau_p = calibration::percentile_threshold(pool, 90.0);
    values.push_back(std::max(tau_o, tau_p) + oracles::range(rng, 0.001, 1.0));
    const DistancePool grown = pool_of(values);
    CHECK(calibration::order_statistic_threshold(grown, 0.1) >= tau_o);
    CHECK(calibration::percentile_threshold(grown, 90.0) >= tau_p);
  }
}

TEST_CASE("model JSON round-trip is byte-identical") {
  const auto labeled = labeled_from(grid(0.1, 0.1, 10), grid(1.1, 0.1, 10));
  auto model = calibration::calibrate(labeled, 0.1, 90.0);
  model.utterance_ids = {"utt_a", "utt_b"};
  const std::string once = calibration::model_to_json(model);
  const auto reread = calibration::model_from_json(once);
  const std::string twice = calibration::model_to_json(reread);
  CHECK(once == twice);
  CHECK(reread.tau_global == model.tau_global);
  CHECK(reread.pool_correct.values == model.pool_correct.values);
  CHECK(reread.utterance_ids == model.utterance_ids);
  CHECK(reread.mfcc_config == model.mfcc_config);  // config rides along unchanged
}

TEST_CASE("model reader rejects missing or unknown versions") {
  const auto labeled = labeled_from(grid(0.1, 0.1, 10), grid(1.1, 0.1, 10));
  const auto model = calibration::calibrate(labeled, 0.1, 90.0);
  std::string text = calibration::model_to_json(model);
  CHECK_THROWS_AS(calibration::model_from_json("{}"), MalformedModel);
  CHECK_THROWS_AS(calibration::model_from_json("not json"), MalformedModel);
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  CHECK_THROWS_AS(calibration::model_from_json(text), MalformedModel);
}

TEST_CASE("make_pool validates and sorts") {
  const DistancePool p = pool_of({3.0, 1.0, 2.0});
  CHECK(std::is_sorted(p.values.begin(), p.values.end()));
  CHECK_THROWS_AS(pool_of({-1.0}), EmptyPool);
  CHECK_THROWS_AS(pool_of({std::nan("")}), EmptyPool);
}

TEST_CASE("empty pools are rejected by every operation") {
  const DistancePool empty;
  CHECK_THROWS_AS(calibration::order_statistic_threshold(empty, 0.1), EmptyPool);
  CHECK_THROWS_AS(calibration::percentile_threshold(empty, 90.0), EmptyPool);
  CHECK_THROWS_AS(calibration::empirical_cdf(empty, 1.0), EmptyPool);
  CHECK_THROWS_AS(calibration::kde_fit(empty), DegeneratePool);
}

}  // TEST_SUITE
