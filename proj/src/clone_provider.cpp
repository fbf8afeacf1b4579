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

#include "prondiff/clone_provider.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "prondiff/base64.hpp"
#include "prondiff/errors.hpp"

namespace prondiff::clone_provider {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string host_port;  // scheme://host:port, what httplib::Client wants
  std::string path;
};

ParsedUrl parse_url(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw UsageError("endpoint must be an http://host[:port]/path URL");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

double backoff_delay(const RemoteConfig& cfg, int attempt) {
  const double base = cfg.backoff_base_s * std::pow(cfg.backoff_factor, attempt);
  thread_local std::mt19937 rng(std::random_device{}());
  const double u =
      2.0 * (static_cast<double>(rng()) / static_cast<double>(std::mt19937::max())) - 1.0;
  return std::max(0.0, base * (1.0 + cfg.jitter_frac * u));
}

audio::AudioBuffer ingest(audio::AudioBuffer a) {
  return audio::resample(a, audio::kCanonicalRate);
}

}  // namespace

RemoteConfig remote_config_from_env() {
  RemoteConfig cfg;
  if (const char* token = std::getenv(kAuthTokenEnv)) cfg.auth_token = token;
  return cfg;
}

CloneResult fetch_clone_local(const std::filesystem::path& root, const CloneRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path wav_path = root / (req.utterance_id + "_clone.wav");
  if (!std::filesystem::exists(wav_path))
    throw CloneNotFound("no local clone at " + wav_path.string());

  CloneResult result;
  result.source = CloneSource::Local;
  result.audio = ingest(audio::load_wav(wav_path));

  const std::filesystem::path grid_path = root / (req.utterance_id + "_clone.TextGrid");
  if (std::filesystem::exists(grid_path))
    result.alignment = textgrid::load_textgrid(grid_path);

  result.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

CloneResult fetch_clone_remote(const std::string& endpoint, const CloneRequest& req,
                               const RemoteConfig& cfg) {
  const ParsedUrl url = parse_url(endpoint);
  const auto t0 = std::chrono::steady_clock::now();

  json body;
  body["utterance_id"] = req.utterance_id;
  body["transcript"] = req.transcript;
  body["voice_id"] = req.speaker_voice_id;
  if (req.audio) body["audio_b64"] = base64::encode(audio::encode_wav_pcm16(*req.audio));
  const std::string payload = body.dump();

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::duration<double>(backoff_delay(cfg, attempt - 1)));

    httplib::Client client(url.host_port);
    client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(cfg.timeout_s));
    httplib::Headers headers;
    if (!cfg.auth_token.empty())
      headers.emplace("Authorization", "Bearer " + cfg.auth_token);

    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_failure = "connection failed or timed out (" + httplib::to_string(res.error()) + ")";
      continue;  // retryable
    }
    if (res->status >= 500) {
      last_failure = "server error " + std::to_string(res->status);
      continue;  // retryable
    }
    if (res->status >= 400) throw RemoteError(res->status, res->body);

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw BadPayload(std::string("response is not JSON: ") + e.what());
    }
    if (!reply.contains("audio_b64") || !reply["audio_b64"].is_string())
      throw BadPayload("response lacks audio_b64");

    CloneResult result;
    result.source = CloneSource::Remote;
    result.retries_used = attempt;
    try {
      result.audio = ingest(audio::decode_wav(base64::decode(reply["audio_b64"].get<std::string>())));
    } catch (const Error& e) {
      throw BadPayload(std::string("audio_b64 did not decode to usable WAV: ") + e.what());
    }
    if (reply.contains("alignment_textgrid") && reply["alignment_textgrid"].is_string()) {
      try {
        result.alignment = textgrid::parse_textgrid(reply["alignment_textgrid"].get<std::string>());
      } catch (const Error& e) {
        throw BadPayload(std::string("alignment_textgrid failed to parse: ") + e.what());
      }
    }
    result.latency_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }
  throw Timeout("remote clone fetch failed after " + std::to_string(cfg.retries + 1) +
                " attempts: " + last_failure);
}

std::vector<CloneResult> fetch_clones_remote(const std::string& endpoint,
                                             const std::vector<CloneRequest>& requests,
                                             const RemoteConfig& cfg) {
  std::vector<CloneResult> results(requests.size());
  std::vector<std::exception_ptr> failures(requests.size());
  std::atomic<std::size_t> next{0};

  const std::size_t workers = std::min<std::size_t>(
      requests.size(), static_cast<std::size_t>(std::max(1, cfg.max_in_flight)));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) return;
        try {
          results[i] = fetch_clone_remote(endpoint, requests[i], cfg);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return results;
}

}  // namespace prondiff::clone_provider
