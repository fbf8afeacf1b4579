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

// Drives the actual CLI binary: exit codes, stdout/stderr stream contracts,
// and cross-command flows.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "prondiff/base64.hpp"
#include "prondiff/calibration.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prondiff;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(PRONDIFF_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(rc);
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("prondiff_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Shared corpus for the CLI flows.
struct Corpus {
  fs::path dir;
  fs::path manifest;
  fs::path model;
};

// Four utterances so no midpoint-probe words are generated: all incorrect
// words carry the full shift and the global rule separates them cleanly.
Corpus make_corpus(const std::string& tag) {
  Corpus c;
  c.dir = temp_dir(tag);
  auto r = run_cli("fixture --seed 21 --out-dir " + (c.dir / "fix").string() +
                       " --utterances 4 --words 4 --misp-rate 0.375",
                   c.dir);
  REQUIRE(r.exit_code == 0);
  c.manifest = c.dir / "fix" / "manifest.json";
  c.model = c.dir / "model.json";
  r = run_cli("calibrate --manifest " + c.manifest.string() + " --alpha 0.45 --out " +
                  c.model.string(),
              c.dir);
  REQUIRE(r.exit_code == 0);
  return c;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("calibrate emits a JSON payload on stdout and a valid model file") {
  const Corpus c = make_corpus("calibrate");
  const auto model = calibration::load_model(c.model);
  CHECK(model.pool_correct.size() + model.pool_incorrect.size() == 16);

  const auto r = run_cli("calibrate --manifest " + c.manifest.string() + " --alpha 0.45 --out " +
                             (c.dir / "model_again.json").string(),
                         c.dir);
  CHECK(r.exit_code == 0);
  const json payload = json::parse(r.out);  // stdout is pure payload
  CHECK(payload.contains("tau_global"));
  CHECK(payload.at("pool_sizes").at("correct").get<int>() > 0);
}

TEST_CASE("tau_global matches the independent sort oracle") {
  const Corpus c = make_corpus("oracle");
  const auto model = calibration::load_model(c.model);
  std::vector<double> pooled = model.pool_correct.values;
  pooled.insert(pooled.end(), model.pool_incorrect.values.begin(),
                model.pool_incorrect.values.end());
  std::sort(pooled.begin(), pooled.end());
  const double n = static_cast<double>(pooled.size());
  auto q = static_cast<long>(std::ceil((n + 1.0) * (1.0 - 0.45)));
  q = std::clamp<long>(q, 1, static_cast<long>(pooled.size()));
  CHECK(model.tau_global == pooled[static_cast<std::size_t>(q - 1)]);
}

TEST_CASE("detect: identity clone is all CORRECT and detection is not an error") {
  const Corpus c = make_corpus("detect");
  const fs::path wav = c.dir / "fix" / "fix_0000.wav";
  const fs::path grid = c.dir / "fix" / "fix_0000.TextGrid";
  const auto r = run_cli("detect --model " + c.model.string() + " --real-wav " + wav.string() +
                             " --real-textgrid " + grid.string() + " --clone-wav " + wav.string() +
                             " --clone-textgrid " + grid.string() + " --decision global",
                         c.dir);
  CHECK(r.exit_code == 0);
  const json report = json::parse(r.out);
  for (const auto& w : report.at("words"))
    CHECK(w.at("label").get<std::string>() == "CORRECT");
}

TEST_CASE("detect flags perturbed words but still exits 0") {
  const Corpus c = make_corpus("flagged");
  // fix_0001 has mispronounced words by construction (rate 0.375).
  const auto r = run_cli("detect --model " + c.model.string() + " --real-wav " +
                             (c.dir / "fix" / "fix_0001.wav").string() + " --real-textgrid " +
                             (c.dir / "fix" / "fix_0001.TextGrid").string() + " --clone-wav " +
                             (c.dir / "fix" / "fix_0001_clone.wav").string() +
                             " --clone-textgrid " +
                             (c.dir / "fix" / "fix_0001_clone.TextGrid").string() +
                             " --decision global",
                         c.dir);
  CHECK(r.exit_code == 0);
  const json report = json::parse(r.out);
  int flagged = 0;
  for (const auto& w : report.at("words"))
    if (w.at("label").get<std::string>() != "CORRECT") ++flagged;
  CHECK(flagged > 0);
}

TEST_CASE("detect without clone and without endpoint exits 2 with CloneNotFound") {
  const Corpus c = make_corpus("noclone");
  // Point at a real wav whose directory has no <id>_clone.wav.
  const fs::path lone_wav = c.dir / "lone.wav";
  fs::copy_file(c.dir / "fix" / "fix_0000.wav", lone_wav);
  const fs::path lone_grid = c.dir / "lone.TextGrid";
  fs::copy_file(c.dir / "fix" / "fix_0000.TextGrid", lone_grid);
  const auto r = run_cli("detect --model " + c.model.string() + " --real-wav " +
                             lone_wav.string() + " --real-textgrid " + lone_grid.string() +
                             " --utterance-id lone",
                         c.dir);
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  const json diag = json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(diag.at("type") == "CloneNotFound");
  CHECK(diag.at("level") == "error");
}

TEST_CASE("evaluate writes a byte-deterministic report") {
  const Corpus c = make_corpus("evaluate");
  const std::string base = "evaluate --model " + c.model.string() + " --manifest " +
                           c.manifest.string() + " --decision global --out ";
  auto r1 = run_cli(base + (c.dir / "r1.json").string(), c.dir);
  auto r2 = run_cli(base + (c.dir / "r2.json").string(), c.dir);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  const std::string rep1 = read_file(c.dir / "r1.json");
  CHECK(rep1 == read_file(c.dir / "r2.json"));
  const json report = json::parse(rep1);
  CHECK(report.at("accuracy").get<double>() >= 0.95);  // engineered separation
  // Same ids as calibration: the overlap warning lands on stderr as JSON.
  bool overlap = false;
  std::istringstream err(r1.err);
  std::string line;
  while (std::getline(err, line)) {
    if (line.empty()) continue;
    const json diag = json::parse(line);
    if (diag.at("message").get<std::string>().find("train/test overlap") != std::string::npos)
      overlap = true;
  }
  CHECK(overlap);
}

TEST_CASE("evaluate --format table renders 3-decimal rates") {
  const Corpus c = make_corpus("table");
  const auto r = run_cli("evaluate --model " + c.model.string() + " --manifest " +
                             c.manifest.string() + " --decision global --format table",
                         c.dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("class  precision", 0) == 0);
  CHECK(r.out.find("accuracy 1.000") != std::string::npos);
  CHECK(r.out.find("outcome") != std::string::npos);
}

TEST_CASE("summarize consumes an evaluation report") {
  const Corpus c = make_corpus("summarize");
  auto r = run_cli("evaluate --model " + c.model.string() + " --manifest " +
                       c.manifest.string() + " --decision global --out " +
                       (c.dir / "report.json").string(),
                   c.dir);
  REQUIRE(r.exit_code == 0);
  r = run_cli("summarize --report " + (c.dir / "report.json").string() + " --group-by truth",
              c.dir);
  CHECK(r.exit_code == 0);
  const json sums = json::parse(r.out);
  CHECK(sums.at("group_by") == "truth");
  CHECK(!sums.at("distance_summaries").empty());
}

TEST_CASE("manifest with zero labeled words exits 2 with the empty-pools message") {
  const Corpus c = make_corpus("empty");
  json manifest = json::parse(read_file(c.manifest));
  for (auto& e : manifest.at("entries")) e.erase("word_labels");
  // Keep the manifest beside the wavs so its relative paths stay valid.
  const fs::path unlabeled = c.dir / "fix" / "unlabeled.json";
  std::ofstream(unlabeled) << manifest.dump(2);
  const auto r = run_cli("calibrate --manifest " + unlabeled.string() + " --out " +
                             (c.dir / "m.json").string(),
                         c.dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("empty calibration pools") != std::string::npos);
}

TEST_CASE("usage errors exit 1 with a structured diagnostic") {
  const fs::path dir = temp_dir("usage");
  auto r = run_cli("calibrate --no-such-flag", dir);
  CHECK(r.exit_code == 1);
  const json diag = json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(diag.at("level") == "error");

  r = run_cli("", dir);
  CHECK(r.exit_code == 1);

  // Bad strategy string is also a usage error.
  const Corpus c = make_corpus("badstrat");
  r = run_cli("evaluate --model " + c.model.string() + " --manifest " + c.manifest.string() +
                  " --decision bogus",
              c.dir);
  CHECK(r.exit_code == 1);
}

TEST_CASE("unreadable inputs exit 2") {
  const fs::path dir = temp_dir("unreadable");
  const auto r = run_cli("evaluate --model /nonexistent/model.json --manifest /nonexistent/m.json",
                         dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("stft export produces a CSV with the documented columns") {
  const Corpus c = make_corpus("stft");
  const auto r = run_cli("stft --wav " + (c.dir / "fix" / "fix_0000.wav").string() +
                             " --start 0.1 --end 0.4 --out " + (c.dir / "stft.csv").string(),
                         c.dir);
  CHECK(r.exit_code == 0);
  const std::string csv = read_file(c.dir / "stft.csv");
  CHECK(csv.rfind("time_s,", 0) == 0);
  CHECK(csv.find("mean_mag") != std::string::npos);
}

TEST_CASE("detect fetches the clone from a remote endpoint") {
  const Corpus c = make_corpus("endpoint");
  // Serve the fixture's own clone back through the wire contract.
  std::ifstream wav_in(c.dir / "fix" / "fix_0000_clone.wav", std::ios::binary);
  const std::vector<std::uint8_t> wav_bytes((std::istreambuf_iterator<char>(wav_in)),
                                            std::istreambuf_iterator<char>());
  const std::string grid_text = read_file(c.dir / "fix" / "fix_0000_clone.TextGrid");

  httplib::Server server;
  server.Post("/synthesize", [&](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    CHECK(body.at("utterance_id") == "fix_0000");
    CHECK(!body.at("transcript").get<std::string>().empty());
    res.set_content(json{{"audio_b64", base64::encode(wav_bytes)},
                         {"alignment_textgrid", grid_text}}
                        .dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto r = run_cli("detect --model " + c.model.string() + " --real-wav " +
                             (c.dir / "fix" / "fix_0000.wav").string() + " --real-textgrid " +
                             (c.dir / "fix" / "fix_0000.TextGrid").string() +
                             " --utterance-id fix_0000 --decision global --endpoint "
                             "http://127.0.0.1:" +
                             std::to_string(port) + "/synthesize",
                         c.dir);
  server.stop();
  server_thread.join();

  CHECK(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("words").size() == 4);
  CHECK(report.at("low_fidelity_alignment").get<bool>() == false);
}

TEST_CASE("unreachable endpoint exits 3 (remote-service failure)") {
  const Corpus c = make_corpus("deadendpoint");
  const auto r = run_cli("detect --model " + c.model.string() + " --real-wav " +
                             (c.dir / "fix" / "fix_0000.wav").string() + " --real-textgrid " +
                             (c.dir / "fix" / "fix_0000.TextGrid").string() +
                             " --utterance-id fix_0000 --retries 0 --timeout 0.5" +
                             " --endpoint http://127.0.0.1:9/synthesize",
                         c.dir);
  CHECK(r.exit_code == 3);
  const json diag = json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(diag.at("type") == "Timeout");
}

TEST_CASE("fixture command is deterministic across runs") {
  const fs::path dir = temp_dir("fixdet");
  auto r1 = run_cli("fixture --seed 5 --out-dir " + (dir / "a").string() +
                        " --utterances 2 --words 3 --misp-rate 0.5",
                    dir);
  auto r2 = run_cli("fixture --seed 5 --out-dir " + (dir / "b").string() +
                        " --utterances 2 --words 3 --misp-rate 0.5",
                    dir);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    CHECK(read_file(entry.path()) == read_file(dir / "b" / entry.path().filename()));
  }
}

}  // TEST_SUITE
