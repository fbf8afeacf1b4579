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

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "prondiff/audio.hpp"
#include "prondiff/base64.hpp"
#include "prondiff/clone_provider.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/textgrid.hpp"

using namespace prondiff;
using clone_provider::CloneRequest;
using clone_provider::RemoteConfig;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

audio::AudioBuffer ramp(std::size_t n, int rate) {
  audio::AudioBuffer a;
  a.sample_rate = rate;
  a.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    a.samples[i] = 0.5 * std::sin(0.01 * static_cast<double>(i));
  return a;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("prondiff_clone_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Stub TTS service bound to an ephemeral port.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/synthesize", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/synthesize";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteConfig fast_config() {
  RemoteConfig cfg;
  cfg.timeout_s = 3.0;
  cfg.retries = 3;
  cfg.backoff_base_s = 0.02;  // keep the suite quick
  cfg.jitter_frac = 0.0;
  return cfg;
}

std::string wav_b64(const audio::AudioBuffer& a) {
  return base64::encode(audio::encode_wav_pcm16(a));
}

}  // namespace

TEST_SUITE("clone_provider") {

TEST_CASE("local fetch returns audio plus optional alignment") {
  const fs::path dir = temp_dir("local");
  const audio::AudioBuffer a = ramp(8000, 16000);
  audio::save_wav_pcm16(a, dir / "arctic_a0028_clone.wav");

  CloneRequest req;
  req.utterance_id = "arctic_a0028";

  SUBCASE("wav without TextGrid") {
    const auto result = clone_provider::fetch_clone_local(dir, req);
    CHECK(result.source == clone_provider::CloneSource::Local);
    CHECK(!result.alignment.has_value());
    CHECK(result.audio.samples.size() == 8000);
  }
  SUBCASE("wav with TextGrid") {
    textgrid::TextGrid g;
    g.xmax = 0.5;
    g.tiers.push_back({"words", {{0.0, 0.5, "fraud"}}});
    std::ofstream(dir / "arctic_a0028_clone.TextGrid") << textgrid::serialize_textgrid(g);
    const auto result = clone_provider::fetch_clone_local(dir, req);
    REQUIRE(result.alignment.has_value());
    CHECK(result.alignment->tiers.size() == 1);
  }
  SUBCASE("missing file") {
    req.utterance_id = "nope";
    CHECK_THROWS_AS(clone_provider::fetch_clone_local(dir, req), CloneNotFound);
  }
  SUBCASE("byte-stable across calls") {
    const auto r1 = clone_provider::fetch_clone_local(dir, req);
    const auto r2 = clone_provider::fetch_clone_local(dir, req);
    CHECK(r1.audio.samples == r2.audio.samples);
  }
}

TEST_CASE("local fetch resamples to the canonical rate") {
  const fs::path dir = temp_dir("rate");
  audio::save_wav_pcm16(ramp(32000, 32000), dir / "u1_clone.wav");
  CloneRequest req;
  req.utterance_id = "u1";
  const auto result = clone_provider::fetch_clone_local(dir, req);
  CHECK(result.audio.sample_rate == audio::kCanonicalRate);
  CHECK(result.audio.samples.size() == 16000);
}

TEST_CASE("remote fetch decodes an echoed WAV") {
  const audio::AudioBuffer served = ramp(4000, 16000);
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const json body = json::parse(req.body);
    CHECK(body.at("utterance_id") == "u7");
    CHECK(body.at("transcript") == "robbery bribery fraud");
    CHECK(req.get_header_value("Authorization") == "Bearer sekrit");
    res.set_content(json{{"audio_b64", wav_b64(served)}}.dump(), "application/json");
  });

  CloneRequest req;
  req.utterance_id = "u7";
  req.transcript = "robbery bribery fraud";
  RemoteConfig cfg = fast_config();
  cfg.auth_token = "sekrit";
  const auto result = clone_provider::fetch_clone_remote(server.endpoint(), req, cfg);
  CHECK(result.source == clone_provider::CloneSource::Remote);
  CHECK(result.retries_used == 0);
  CHECK(hits == 1);
  REQUIRE(result.audio.samples.size() == served.samples.size());
  for (std::size_t i = 0; i < served.samples.size(); ++i)
    CHECK(std::abs(result.audio.samples[i] - served.samples[i]) <= 1.0 / 32768.0);
}

TEST_CASE("5xx responses are retried; success records the retry count") {
  const audio::AudioBuffer served = ramp(2000, 16000);
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    const int n = ++hits;
    if (n <= 2) {
      res.status = 500;
      res.set_content("boom", "text/plain");
      return;
    }
    res.set_content(json{{"audio_b64", wav_b64(served)}}.dump(), "application/json");
  });

  CloneRequest req;
  req.utterance_id = "u8";
  const auto result =
      clone_provider::fetch_clone_remote(server.endpoint(), req, fast_config());
  CHECK(result.retries_used == 2);
  CHECK(hits == 3);
}

TEST_CASE("retry budget exhaustion raises Timeout") {
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  RemoteConfig cfg = fast_config();
  cfg.retries = 2;
  CloneRequest req;
  req.utterance_id = "u9";
  CHECK_THROWS_AS(clone_provider::fetch_clone_remote(server.endpoint(), req, cfg), Timeout);
  CHECK(hits == 3);  // initial attempt + 2 retries
}

TEST_CASE("4xx fails immediately without retrying") {
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 404;
    res.set_content("no such voice", "text/plain");
  });
  CloneRequest req;
  req.utterance_id = "u10";
  try {
    clone_provider::fetch_clone_remote(server.endpoint(), req, fast_config());
    FAIL("expected RemoteError");
  } catch (const RemoteError& e) {
    CHECK(e.status() == 404);
    CHECK(e.body() == "no such voice");
  }
  CHECK(hits == 1);
}

TEST_CASE("slow server hits the client timeout") {
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content("{}", "application/json");
  });
  RemoteConfig cfg = fast_config();
  cfg.timeout_s = 0.2;
  cfg.retries = 0;
  CloneRequest req;
  req.utterance_id = "u11";
  CHECK_THROWS_AS(clone_provider::fetch_clone_remote(server.endpoint(), req, cfg), Timeout);
}

TEST_CASE("malformed payloads raise BadPayload") {
  int mode = 0;
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    switch (mode) {
      case 0:
        res.set_content("not json", "text/plain");
        break;
      case 1:
        res.set_content("{}", "application/json");
        break;
      default:
        res.set_content(json{{"audio_b64", "@@@@"}}.dump(), "application/json");
        break;
    }
  });
  CloneRequest req;
  req.utterance_id = "u12";
  for (mode = 0; mode < 3; ++mode) {
    CHECK_THROWS_AS(clone_provider::fetch_clone_remote(server.endpoint(), req, fast_config()),
                    BadPayload);
  }
}

TEST_CASE("remote alignment TextGrid is parsed when present") {
  textgrid::TextGrid g;
  g.xmax = 0.25;
  g.tiers.push_back({"words", {{0.0, 0.25, "fraud"}}});
  const audio::AudioBuffer served = ramp(4000, 16000);
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"audio_b64", wav_b64(served)},
                         {"alignment_textgrid", textgrid::serialize_textgrid(g)}}
                        .dump(),
                    "application/json");
  });
  CloneRequest req;
  req.utterance_id = "u13";
  const auto result =
      clone_provider::fetch_clone_remote(server.endpoint(), req, fast_config());
  REQUIRE(result.alignment.has_value());
  CHECK(result.alignment->tiers[0].intervals[0].label == "fraud");
}

TEST_CASE("concurrent fetches join in request order") {
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const auto id = body.at("utterance_id").get<std::string>();
    // Encode the request number in the WAV length.
    const auto n = static_cast<std::size_t>(1000 + 100 * (id.back() - '0'));
    res.set_content(json{{"audio_b64", wav_b64(ramp(n, 16000))}}.dump(), "application/json");
  });

  std::vector<CloneRequest> requests(5);
  for (int i = 0; i < 5; ++i) requests[static_cast<std::size_t>(i)].utterance_id = "u" + std::to_string(i);
  RemoteConfig cfg = fast_config();
  cfg.max_in_flight = 3;
  const auto results =
      clone_provider::fetch_clones_remote(server.endpoint(), requests, cfg);
  REQUIRE(results.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(results[static_cast<std::size_t>(i)].audio.samples.size() ==
          static_cast<std::size_t>(1000 + 100 * i));
}

TEST_CASE("remote_config_from_env picks up the bearer token") {
  setenv(clone_provider::kAuthTokenEnv, "tok123", 1);
  CHECK(clone_provider::remote_config_from_env().auth_token == "tok123");
  unsetenv(clone_provider::kAuthTokenEnv);
  CHECK(clone_provider::remote_config_from_env().auth_token.empty());
}

TEST_CASE("base64 round-trips and rejects junk") {
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < 257; ++i) bytes.push_back(static_cast<std::uint8_t>(i % 256));
  CHECK(base64::decode(base64::encode(bytes)) == bytes);
  CHECK(base64::encode({}) == "");
  CHECK(base64::encode({'f'}) == "Zg==");
  CHECK(base64::encode({'f', 'o'}) == "Zm8=");
  CHECK(base64::encode({'f', 'o', 'o'}) == "Zm9v");
  CHECK_THROWS_AS(base64::decode("abc"), BadPayload);
  CHECK_THROWS_AS(base64::decode("a=bc"), BadPayload);
  CHECK_THROWS_AS(base64::decode("@@@@"), BadPayload);
}

}  // TEST_SUITE
