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

#ifndef PRONDIFF_CLONE_PROVIDER_HPP
#define PRONDIFF_CLONE_PROVIDER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prondiff/audio.hpp"
#include "prondiff/textgrid.hpp"

namespace prondiff::clone_provider {

/// Environment variable holding the bearer token for remote TTS endpoints.
/// The value is sent as an Authorization header and never logged.
inline constexpr const char* kAuthTokenEnv = "PRONDIFF_TTS_TOKEN";

struct CloneRequest {
  std::string utterance_id;
  std::string transcript;
  std::string speaker_voice_id;
  std::optional<audio::AudioBuffer> audio;  // for voice-adaptation services
};

enum class CloneSource { Local, Remote };

struct CloneResult {
  audio::AudioBuffer audio;  // already resampled to the canonical 16 kHz
  std::optional<textgrid::TextGrid> alignment;
  CloneSource source = CloneSource::Local;
  double latency_s = 0.0;
  int retries_used = 0;
};

/// Read `<root>/<utterance_id>_clone.wav` (required) and
/// `<root>/<utterance_id>_clone.TextGrid` (optional). Throws CloneNotFound
/// when the wav is missing.
CloneResult fetch_clone_local(const std::filesystem::path& root, const CloneRequest& req);

struct RemoteConfig {
  double timeout_s = 10.0;
  int retries = 3;  // maximum retries after the first attempt
  double backoff_base_s = 0.5;
  double backoff_factor = 2.0;
  double jitter_frac = 0.1;
  int max_in_flight = 4;
  std::string auth_token;  // empty = no Authorization header
};

RemoteConfig remote_config_from_env();

/// POST {utterance_id, transcript, voice_id, audio_b64?} to the endpoint and
/// decode the {audio_b64, alignment_textgrid?} response. 5xx and timeouts are
/// retried with exponential backoff; 4xx fails immediately (RemoteError).
/// Malformed responses throw BadPayload.
CloneResult fetch_clone_remote(const std::string& endpoint, const CloneRequest& req,
                               const RemoteConfig& cfg);

/// Issue requests concurrently (at most cfg.max_in_flight at a time) and
/// return results in request order. The first failure is rethrown after all
/// workers finish.
std::vector<CloneResult> fetch_clones_remote(const std::string& endpoint,
                                             const std::vector<CloneRequest>& requests,
                                             const RemoteConfig& cfg);

}  // namespace prondiff::clone_provider

#endif  // PRONDIFF_CLONE_PROVIDER_HPP
