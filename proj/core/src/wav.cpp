// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

WavAudio parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw IoError("WAV file is truncated (no RIFF header)");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::uint8_t* body = chunk + 8;
    const std::size_t available = bytes.size() - pos - 8;

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw IoError("WAV fmt chunk is truncated");
      std::uint16_t format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      block_align = read_u16(body + 12);
      bits = read_u16(body + 14);
      if (format == kFormatExtensible) {
        if (size < 40 || available < 40) throw IoError("WAV extensible fmt chunk is truncated");
        format = read_u16(body + 24);  // first two bytes of the sub-format GUID
      }
      if (format != kFormatPcm) {
        throw FormatError("unsupported WAV encoding " + std::to_string(format) +
                          " (only integer PCM is accepted)");
      }
      if (bits != 16 && bits != 24) {
        throw FormatError("unsupported bit depth " + std::to_string(bits) + " (16 or 24 only)");
      }
      if (channels == 0 || rate == 0 || block_align != channels * (bits / 8)) {
        throw FormatError("inconsistent WAV fmt chunk");
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("WAV data chunk precedes fmt chunk");
      if (size > available) throw IoError("WAV data chunk is truncated");
      const std::size_t frames = size / block_align;
      const int bytes_per_sample = bits / 8;
      const double scale = 1.0 / static_cast<double>(1 << (bits - 1));
      WavAudio out;
      out.sample_rate = rate;
      out.bits_per_sample = bits;
      out.channels = channels;
      out.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        const std::uint8_t* s = body + f * block_align;
        std::int32_t v;
        if (bytes_per_sample == 2) {
          v = static_cast<std::int16_t>(read_u16(s));
        } else {
          v = static_cast<std::int32_t>(std::uint32_t(s[0]) << 8 | std::uint32_t(s[1]) << 16 |
                                        std::uint32_t(s[2]) << 24) >> 8;
        }
        out.samples[f] = v * scale;
      }
      return out;
    }
    pos += 8 + static_cast<std::size_t>(size) + (size & 1u);
  }
  if (!have_fmt) throw IoError("WAV file is truncated (no fmt chunk)");
  throw IoError("WAV file is truncated (no data chunk)");
}

WavAudio load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(std::span<const double> samples, double sample_rate,
                                     int bits_per_sample, int channels) {
  if (bits_per_sample != 16 && bits_per_sample != 24) {
    throw FormatError("can only write 16- or 24-bit PCM");
  }
  if (channels < 1) throw FormatError("channel count must be positive");
  const int bytes_per_sample = bits_per_sample / 8;
  const auto block_align = static_cast<std::uint16_t>(channels * bytes_per_sample);
  const auto frames = static_cast<std::uint32_t>(samples.size());
  const std::uint32_t data_size = frames * block_align;
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, rate);
  put_u32(out, rate * block_align);
  put_u16(out, block_align);
  put_u16(out, static_cast<std::uint16_t>(bits_per_sample));
  put_tag(out, "data");
  put_u32(out, data_size);

  const double full = static_cast<double>(1 << (bits_per_sample - 1));
  for (double x : samples) {
    const auto v = static_cast<std::int32_t>(std::clamp(std::round(x * full), -full, full - 1.0));
    // Every channel carries the same signal.
    for (int c = 0; c < channels; ++c) {
      for (int b = 0; b < bytes_per_sample; ++b) {
        out.push_back(static_cast<std::uint8_t>(static_cast<std::uint32_t>(v) >> (8 * b)));
      }
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate, int bits_per_sample) {
  const auto bytes = encode_wav(samples, sample_rate, bits_per_sample);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace rgw
