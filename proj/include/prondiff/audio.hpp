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

#ifndef PRONDIFF_AUDIO_HPP
#define PRONDIFF_AUDIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace prondiff::audio {

// The pipeline-wide sample rate. Every input is resampled to this on ingest
// so MFCC filterbanks and distances stay comparable across corpora.
inline constexpr int kCanonicalRate = 16000;

/// Mono audio with samples normalized to [-1, 1]. Immutable by convention:
/// operations return new buffers.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kCanonicalRate;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  bool empty() const { return samples.empty(); }
};

/// Decode a RIFF/WAVE container. PCM 16-bit and IEEE float 32-bit are
/// accepted; multi-channel input is downmixed to mono by channel averaging.
/// 16-bit samples are scaled by 1/32768; float samples are clamped to [-1,1].
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

/// Encode as PCM16 mono WAV (round-trips through decode_wav within 1/32768
/// per sample). Used for fixture generation.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& a);

AudioBuffer load_wav(const std::filesystem::path& path);
void save_wav_pcm16(const AudioBuffer& a, const std::filesystem::path& path);

/// max_t |samples[t]|. Zero only for an all-zero signal.
double peak_amplitude(const AudioBuffer& a);

/// Sample window [floor(start*sr), floor(end*sr)). Requires
/// 0 <= start < end <= duration.
AudioBuffer slice(const AudioBuffer& a, double start_s, double end_s);

/// Windowed-sinc resampling (Blackman window, normalized taps, so a constant
/// signal stays exactly constant). Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& a, int target_rate);

}  // namespace prondiff::audio

#endif  // PRONDIFF_AUDIO_HPP
