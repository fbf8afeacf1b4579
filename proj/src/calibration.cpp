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

#include "prondiff/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prondiff/errors.hpp"

namespace prondiff::calibration {

namespace {

using nlohmann::json;

constexpr double kSqrt2Pi = 2.50662827463100050241;

double sample_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / (n - 1.0));
}

}  // namespace

DistancePool make_pool(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw EmptyPool("distance pools only hold finite non-negative values");
  }
  std::sort(values.begin(), values.end());
  return DistancePool{std::move(values)};
}

double order_statistic_threshold(const DistancePool& pool, double alpha) {
  if (pool.empty()) throw EmptyPool("order_statistic_threshold on empty pool");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  const auto n = static_cast<double>(pool.size());
  auto q = static_cast<long>(std::ceil((n + 1.0) * (1.0 - alpha)));
  q = std::clamp<long>(q, 1, static_cast<long>(pool.size()));
  return pool.values[static_cast<std::size_t>(q - 1)];
}

double percentile_threshold(const DistancePool& pool, double percent) {
  if (pool.empty()) throw EmptyPool("percentile_threshold on empty pool");
  if (!(percent > 0.0) || percent > 100.0) throw UsageError("percent must lie in (0, 100]");
  const double target = percent / 100.0;
  const std::size_t n = pool.size();
  // inf{x in pool : F(x) >= target}; with duplicates F jumps past every copy,
  // so evaluate F via upper_bound at each candidate.
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pool.values[i];
    const auto count = static_cast<double>(
        std::upper_bound(pool.values.begin(), pool.values.end(), x) - pool.values.begin());
    if (count / static_cast<double>(n) >= target) return x;
  }
  return pool.values.back();
}

double empirical_cdf(const DistancePool& pool, double x) {
  if (pool.empty()) throw EmptyPool("empirical_cdf on empty pool");
  const auto count = std::upper_bound(pool.values.begin(), pool.values.end(), x) -
                     pool.values.begin();
  return static_cast<double>(count) / static_cast<double>(pool.size());
}

double kde_fit(const DistancePool& pool) {
  if (pool.size() < 2) throw DegeneratePool("KDE needs at least two values");
  const double sigma = sample_std(pool.values);
  if (!(sigma > 0.0)) throw DegeneratePool("KDE needs non-zero variance");
  const double iqr = percentile_threshold(pool, 75.0) - percentile_threshold(pool, 25.0);
  const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
  const double h =
      0.9 * spread * std::pow(static_cast<double>(pool.size()), -0.2);
  if (!(h > 0.0)) throw DegeneratePool("Silverman bandwidth collapsed to zero");
  return h;
}

double kde_density(const DistancePool& pool, double bandwidth, double x) {
  if (pool.empty()) throw EmptyPool("kde_density on empty pool");
  if (!(bandwidth > 0.0)) throw DegeneratePool("bandwidth must be positive");
  double acc = 0.0;
  for (double d : pool.values) {
    const double z = (x - d) / bandwidth;
    acc += std::exp(-0.5 * z * z);
  }
  return acc / (static_cast<double>(pool.size()) * bandwidth * kSqrt2Pi);
}

CalibrationModel calibrate(const std::vector<std::pair<distance::WordDistance, PoolLabel>>& labeled,
                           double alpha, double percentile,
                           std::vector<std::string>* warnings) {
  if (labeled.empty()) throw EmptyPool("empty calibration pools: no labeled distances");

  std::vector<double> correct;
  std::vector<double> incorrect;
  std::vector<double> pooled;
  pooled.reserve(labeled.size());
  for (const auto& [wd, label] : labeled) {
    pooled.push_back(wd.d_bar);
    (label == PoolLabel::Correct ? correct : incorrect).push_back(wd.d_bar);
  }

  CalibrationModel model;
  model.alpha = alpha;
  model.percentile = percentile;
  model.strategy = labeled.front().first.strategy;
  model.pool_correct = make_pool(std::move(correct));
  model.pool_incorrect = make_pool(std::move(incorrect));
  const DistancePool all = make_pool(std::move(pooled));
  model.tau_global = order_statistic_threshold(all, alpha);

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  for (PoolLabel label : {PoolLabel::Correct, PoolLabel::Incorrect}) {
    const DistancePool& pool =
        label == PoolLabel::Correct ? model.pool_correct : model.pool_incorrect;
    auto& tau = label == PoolLabel::Correct ? model.tau_correct : model.tau_incorrect;
    auto& bw = label == PoolLabel::Correct ? model.kde_bandwidth_correct
                                           : model.kde_bandwidth_incorrect;
    if (pool.empty()) {
      warn("no '" + std::string(to_string(label)) +
           "' distances; class-specific strategies disabled");
      continue;
    }
    tau = percentile_threshold(pool, percentile);
    try {
      bw = kde_fit(pool);
    } catch (const DegeneratePool& e) {
      warn("KDE fit degenerate for '" + std::string(to_string(label)) + "' pool (" + e.what() +
           "); kde strategy will fall back to cdf-median");
    }
  }
  return model;
}

namespace {

json mfcc_config_to_json(const mfcc::MfccConfig& cfg) {
  return json{{"frame_length", cfg.frame_length},
              {"hop_length", cfg.hop_length},
              {"mel_filter_count", cfg.mel_filter_count},
              {"fft_size", cfg.fft_size},
              {"pre_emphasis", cfg.pre_emphasis},
              {"include_c0", cfg.include_c0},
              {"lifter", cfg.lifter}};
}

mfcc::MfccConfig mfcc_config_from_json(const json& j) {
  mfcc::MfccConfig cfg;
  cfg.frame_length = j.at("frame_length").get<double>();
  cfg.hop_length = j.at("hop_length").get<double>();
  cfg.mel_filter_count = j.at("mel_filter_count").get<int>();
  cfg.fft_size = j.at("fft_size").get<int>();
  cfg.pre_emphasis = j.at("pre_emphasis").get<double>();
  cfg.include_c0 = j.at("include_c0").get<bool>();
  cfg.lifter = j.at("lifter").get<int>();
  return cfg;
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string model_to_json(const CalibrationModel& model) {
  json j;
  j["version"] = model.version;
  j["alpha"] = model.alpha;
  j["percentile"] = model.percentile;
  j["strategy"] = std::string(distance::to_string(model.strategy));
  j["mfcc_config"] = mfcc_config_to_json(model.mfcc_config);
  j["tau_global"] = model.tau_global;
  j["tau_correct"] = optional_to_json(model.tau_correct);
  j["tau_incorrect"] = optional_to_json(model.tau_incorrect);
  j["pool_correct"] = model.pool_correct.values;
  j["pool_incorrect"] = model.pool_incorrect.values;
  j["kde_bandwidths"] = json{{"correct", optional_to_json(model.kde_bandwidth_correct)},
                             {"incorrect", optional_to_json(model.kde_bandwidth_incorrect)}};
  j["utterance_ids"] = model.utterance_ids;
  return j.dump(2) + "\n";
}

CalibrationModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedModel(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.contains("version")) throw MalformedModel("model file lacks a version field");
    const int version = j.at("version").get<int>();
    if (version != 1)
      throw MalformedModel("unsupported model version " + std::to_string(version));

    CalibrationModel model;
    model.version = version;
    model.alpha = j.at("alpha").get<double>();
    model.percentile = j.at("percentile").get<double>();
    model.strategy = distance::strategy_from_string(j.at("strategy").get<std::string>());
    model.mfcc_config = mfcc_config_from_json(j.at("mfcc_config"));
    model.tau_global = j.at("tau_global").get<double>();
    model.tau_correct = optional_from_json(j.at("tau_correct"));
    model.tau_incorrect = optional_from_json(j.at("tau_incorrect"));
    model.pool_correct = make_pool(j.at("pool_correct").get<std::vector<double>>());
    model.pool_incorrect = make_pool(j.at("pool_incorrect").get<std::vector<double>>());
    model.kde_bandwidth_correct = optional_from_json(j.at("kde_bandwidths").at("correct"));
    model.kde_bandwidth_incorrect = optional_from_json(j.at("kde_bandwidths").at("incorrect"));
    if (j.contains("utterance_ids"))
      model.utterance_ids = j.at("utterance_ids").get<std::vector<std::string>>();
    return model;
  } catch (const json::exception& e) {
    throw MalformedModel(std::string("model file missing or mistyped field: ") + e.what());
  }
}

void save_model(const CalibrationModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedModel("cannot write model file " + path.string());
  out << model_to_json(model);
}

CalibrationModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedModel("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace prondiff::calibration
