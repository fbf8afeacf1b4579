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

#include "prondiff/fixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "prondiff/audio.hpp"
#include "prondiff/errors.hpp"
#include "prondiff/textgrid.hpp"

namespace prondiff::fixture {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct WordSpec {
  const char* text;
  double f1, f2, f3;  // Hz, loosely vowel-formant shaped
};

// Ten distinct "words" with spread-out tone stacks.
constexpr std::array<WordSpec, 10> kVocabulary = {{
    {"robbery", 420.0, 1100.0, 2500.0},
    {"bribery", 360.0, 1900.0, 2600.0},
    {"fraud", 550.0, 950.0, 2400.0},
    {"larceny", 480.0, 1500.0, 2700.0},
    {"forgery", 400.0, 1300.0, 2550.0},
    {"perjury", 440.0, 1700.0, 2650.0},
    {"arson", 600.0, 1050.0, 2450.0},
    {"heist", 380.0, 2000.0, 2750.0},
    {"collusion", 520.0, 1250.0, 2580.0},
    {"smuggling", 340.0, 1600.0, 2620.0},
}};

// Only raw engine draws are used so output is identical across platforms
// (std::uniform_* distributions are implementation-defined).
double unit(std::mt19937& rng) {
  return static_cast<double>(rng()) / (static_cast<double>(std::mt19937::max()) + 1.0);
}

double range(std::mt19937& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

std::size_t pick(std::mt19937& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Three-tone complex with a raised-cosine attack/release envelope.
void synth_word(std::vector<double>& out, double f1, double f2, double f3, double duration_s,
                int sample_rate, double amplitude) {
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sample_rate));
  const auto ramp = static_cast<std::size_t>(std::lround(0.02 * sample_rate));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double s = std::sin(2.0 * kPi * f1 * t) + 0.7 * std::sin(2.0 * kPi * f2 * t) +
               0.3 * std::sin(2.0 * kPi * f3 * t);
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
    if (n - 1 - i < ramp) env = std::min(env, 0.5 - 0.5 * std::cos(kPi * static_cast<double>(n - 1 - i) / ramp));
    out.push_back(amplitude / 2.0 * s * env);
  }
}

void synth_gap(std::vector<double>& out, double duration_s, int sample_rate) {
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sample_rate));
  out.insert(out.end(), n, 0.0);
}

std::string utterance_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "fix_%04d", i);
  return buf;
}

}  // namespace

FixtureSummary generate_fixture(const FixtureOptions& opt) {
  if (opt.n_utterances <= 0 || opt.words_per_utterance <= 0)
    throw UsageError("fixture needs positive utterance and word counts");
  if (opt.misp_rate < 0.0 || opt.misp_rate > 1.0)
    throw UsageError("misp_rate must lie in [0, 1]");

  std::filesystem::create_directories(opt.out_dir);
  std::mt19937 rng(opt.seed);

  const int total_words = opt.n_utterances * opt.words_per_utterance;
  const int total_incorrect = static_cast<int>(std::llround(opt.misp_rate * total_words));

  // Spread the incorrect budget evenly; earlier utterances absorb the
  // remainder. Positions within an utterance come from the seeded engine.
  std::vector<int> incorrect_count(static_cast<std::size_t>(opt.n_utterances),
                                   total_incorrect / opt.n_utterances);
  for (int i = 0; i < total_incorrect % opt.n_utterances; ++i)
    ++incorrect_count[static_cast<std::size_t>(i)];

  FixtureSummary summary;
  summary.total_words = total_words;
  summary.incorrect_words = total_incorrect;
  summary.manifest.speaker = "fixture";

  constexpr double kGap = 0.12;
  constexpr double kFullShift = 1.4;        // clear vowel-quality change
  constexpr double kBorderlineShift = 1.12;  // midpoint probe, between the pools
  // Clone renditions run slightly quieter than the real signal so every word
  // has a stable nonzero baseline distance (keeps the correct pool compact).
  constexpr double kCloneAmpRatio = 0.92;

  for (int i = 0; i < opt.n_utterances; ++i) {
    const std::string id = utterance_id(i);
    const int n_words = opt.words_per_utterance;

    // Choose which word slots are mispronounced.
    std::vector<bool> incorrect(static_cast<std::size_t>(n_words), false);
    {
      std::vector<int> slots(static_cast<std::size_t>(n_words));
      for (int k = 0; k < n_words; ++k) slots[static_cast<std::size_t>(k)] = k;
      for (int k = 0; k < incorrect_count[static_cast<std::size_t>(i)]; ++k) {
        const std::size_t j = k + pick(rng, slots.size() - static_cast<std::size_t>(k));
        std::swap(slots[static_cast<std::size_t>(k)], slots[j]);
        incorrect[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])] = true;
      }
    }

    // Every fifth utterance carries one mildly-shifted probe word so eval
    // splits always see a between-pool distance.
    const bool wants_probe = (i % 5) == 4;
    bool probe_placed = false;

    std::vector<double> real_signal;
    std::vector<double> clone_signal;
    textgrid::IntervalTier real_tier{"words", {}};
    textgrid::IntervalTier clone_tier{"words", {}};
    manifest::ManifestEntry entry;
    entry.utterance_id = id;

    synth_gap(real_signal, 0.1, opt.sample_rate);
    synth_gap(clone_signal, 0.1, opt.sample_rate);
    double real_cursor = 0.1;
    double clone_cursor = 0.1;
    real_tier.intervals.push_back({0.0, 0.1, ""});
    clone_tier.intervals.push_back({0.0, 0.1, ""});

    for (int k = 0; k < n_words; ++k) {
      const WordSpec& word = kVocabulary[pick(rng, kVocabulary.size())];
      const double real_dur = range(rng, 0.28, 0.32);
      const double clone_dur = real_dur * range(rng, 0.95, 1.05);
      const double amp = range(rng, 0.5, 0.6);

      const bool is_incorrect = incorrect[static_cast<std::size_t>(k)];
      double shift = 1.0;
      if (is_incorrect) {
        if (wants_probe && !probe_placed) {
          shift = kBorderlineShift;
          probe_placed = true;
        } else {
          shift = kFullShift;
        }
      }

      // Real rendition: jittered formants, plus the shift when mispronounced.
      const double jr = 1.0 + 0.006 * (2.0 * unit(rng) - 1.0);
      synth_word(real_signal, word.f1 * jr, word.f2 * jr * shift, word.f3 * jr, real_dur,
                 opt.sample_rate, amp);
      // Clone rendition: canonical pronunciation, small TTS-style jitter.
      const double jc = 1.0 + 0.003 * (2.0 * unit(rng) - 1.0);
      synth_word(clone_signal, word.f1 * jc, word.f2 * jc, word.f3 * jc, clone_dur,
                 opt.sample_rate, amp * kCloneAmpRatio);

      real_tier.intervals.push_back({real_cursor, real_cursor + real_dur, word.text});
      clone_tier.intervals.push_back({clone_cursor, clone_cursor + clone_dur, word.text});
      real_cursor += real_dur;
      clone_cursor += clone_dur;

      synth_gap(real_signal, kGap, opt.sample_rate);
      synth_gap(clone_signal, kGap, opt.sample_rate);
      real_tier.intervals.push_back({real_cursor, real_cursor + kGap, ""});
      clone_tier.intervals.push_back({clone_cursor, clone_cursor + kGap, ""});
      real_cursor += kGap;
      clone_cursor += kGap;

      entry.word_labels.push_back(
          {k, is_incorrect ? PoolLabel::Incorrect : PoolLabel::Correct});
    }

    audio::AudioBuffer real_audio{std::move(real_signal), opt.sample_rate};
    audio::AudioBuffer clone_audio{std::move(clone_signal), opt.sample_rate};

    textgrid::TextGrid real_grid{0.0, real_audio.duration(), {real_tier}};
    textgrid::TextGrid clone_grid{0.0, clone_audio.duration(), {clone_tier}};
    // Snap the last gap to the true buffer end (sample rounding).
    real_grid.tiers[0].intervals.back().end = real_grid.xmax;
    clone_grid.tiers[0].intervals.back().end = clone_grid.xmax;

    const auto real_wav = opt.out_dir / (id + ".wav");
    const auto real_grid_path = opt.out_dir / (id + ".TextGrid");
    const auto clone_wav = opt.out_dir / (id + "_clone.wav");
    const auto clone_grid_path = opt.out_dir / (id + "_clone.TextGrid");
    audio::save_wav_pcm16(real_audio, real_wav);
    audio::save_wav_pcm16(clone_audio, clone_wav);
    {
      std::ofstream g1(real_grid_path, std::ios::binary);
      g1 << textgrid::serialize_textgrid(real_grid);
      std::ofstream g2(clone_grid_path, std::ios::binary);
      g2 << textgrid::serialize_textgrid(clone_grid);
    }

    entry.real_wav = id + ".wav";
    entry.real_textgrid = id + ".TextGrid";
    entry.clone_wav = id + "_clone.wav";
    entry.clone_textgrid = id + "_clone.TextGrid";
    summary.manifest.entries.push_back(std::move(entry));
  }

  summary.manifest_path = opt.out_dir / "manifest.json";
  manifest::save_manifest(summary.manifest, summary.manifest_path);
  return summary;
}

}  // namespace prondiff::fixture
