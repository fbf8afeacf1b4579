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

#include "prondiff/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "prondiff/errors.hpp"

namespace prondiff::audio {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void write_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Blackman window over u in [-1, 1].
double blackman(double u) {
  if (std::abs(u) > 1.0) return 0.0;
  return 0.42 + 0.5 * std::cos(kPi * u) + 0.08 * std::cos(2.0 * kPi * u);
}

}  // namespace

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw CorruptContainer("file too small for a RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw CorruptContainer("missing RIFF/WAVE magic");

  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* p = bytes.data() + pos;
    std::uint32_t chunk_size = read_u32(p + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(p, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw CorruptContainer("truncated fmt chunk");
      format_tag = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(p, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
      if (data_offset + data_size > bytes.size())
        throw CorruptContainer("data chunk exceeds file size");
    }
    // Chunks are word-aligned; odd sizes carry one pad byte.
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt) throw CorruptContainer("missing fmt chunk");
  if (data_offset == 0 && data_size == 0) throw CorruptContainer("missing data chunk");
  if (channels == 0 || sample_rate == 0) throw CorruptContainer("fmt chunk has zero channels or rate");

  const bool pcm16 = format_tag == 1 && bits == 16;
  const bool float32 = format_tag == 3 && bits == 32;
  if (!pcm16 && !float32)
    throw UnsupportedFormat("only PCM16 and IEEE float32 are supported (format tag " +
                            std::to_string(format_tag) + ", " + std::to_string(bits) + " bits)");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_bytes;

  AudioBuffer out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.resize(frames);
  const std::uint8_t* d = bytes.data() + data_offset;
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const std::uint8_t* s = d + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t v = static_cast<std::int16_t>(read_u16(s));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float f;
        std::memcpy(&f, s, 4);
        acc += std::clamp(static_cast<double>(f), -1.0, 1.0);
      }
    }
    out.samples[i] = acc / channels;
  }
  return out;
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& a) {
  const std::uint32_t data_size = static_cast<std::uint32_t>(a.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  write_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(a.sample_rate));
  write_u32(out, static_cast<std::uint32_t>(a.sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  write_u32(out, data_size);
  for (double s : a.samples) {
    double scaled = std::nearbyint(s * 32768.0);
    std::int16_t v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    write_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptContainer("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

void save_wav_pcm16(const AudioBuffer& a, const std::filesystem::path& path) {
  auto bytes = encode_wav_pcm16(a);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptContainer("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

double peak_amplitude(const AudioBuffer& a) {
  if (a.empty()) throw EmptyBuffer("peak_amplitude on empty buffer");
  double peak = 0.0;
  for (double s : a.samples) peak = std::max(peak, std::abs(s));
  return peak;
}

AudioBuffer slice(const AudioBuffer& a, double start_s, double end_s) {
  const double dur = a.duration();
  if (!(start_s >= 0.0) || !(start_s < end_s) || end_s > dur + 1e-9)
    throw SpanOutOfRange("span [" + std::to_string(start_s) + ", " + std::to_string(end_s) +
                         ") outside buffer of " + std::to_string(dur) + " s");
  std::size_t i0 = static_cast<std::size_t>(std::floor(start_s * a.sample_rate));
  std::size_t i1 = static_cast<std::size_t>(std::floor(end_s * a.sample_rate));
  i1 = std::min(i1, a.samples.size());
  i0 = std::min(i0, i1);
  AudioBuffer out;
  out.sample_rate = a.sample_rate;
  out.samples.assign(a.samples.begin() + static_cast<std::ptrdiff_t>(i0),
                     a.samples.begin() + static_cast<std::ptrdiff_t>(i1));
  return out;
}

AudioBuffer resample(const AudioBuffer& a, int target_rate) {
  if (target_rate <= 0) throw InvalidRate("target rate must be positive");
  if (a.sample_rate == target_rate) return a;

  const std::size_t n = a.samples.size();
  AudioBuffer out;
  out.sample_rate = target_rate;
  if (n == 0) return out;

  const double step = static_cast<double>(a.sample_rate) / target_rate;
  const std::size_t out_n = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * target_rate / a.sample_rate));
  out.samples.resize(out_n);

  // Cutoff relative to the input Nyquist; < 1 only when downsampling.
  const double scale = std::min(1.0, static_cast<double>(target_rate) / a.sample_rate);
  constexpr int kHalfTaps = 32;
  const double support = kHalfTaps / scale;

  for (std::size_t i = 0; i < out_n; ++i) {
    const double t = i * step;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(t - support));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(t + support));
    double acc = 0.0;
    double wsum = 0.0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(lo, 0);
         k <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(n) - 1); ++k) {
      const double x = static_cast<double>(k) - t;
      const double w = sinc(scale * x) * blackman(x / support);
      acc += w * a.samples[static_cast<std::size_t>(k)];
      wsum += w;
    }
    // Taps are renormalized so DC passes through exactly, including at edges.
    out.samples[i] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

}  // namespace prondiff::audio
