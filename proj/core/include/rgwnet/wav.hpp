// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rgw {

struct WavAudio {
  std::vector<double> samples;  // channel 0, scaled to [-1, 1)
  double sample_rate = 0.0;
  int bits_per_sample = 0;
  int channels = 0;
};

/// Reads a RIFF/WAVE file with signed 16- or 24-bit little-endian PCM.
/// Integer samples are divided by 2^(bits-1); only channel 0 is kept.
/// Throws FormatError for anything else and IoError for truncated files.
WavAudio load_wav(const std::filesystem::path& path);
WavAudio parse_wav(std::span<const std::uint8_t> bytes);

/// Writes mono PCM: round(x * 2^(bits-1)) clamped to the integer range.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate, int bits_per_sample = 16);
std::vector<std::uint8_t> encode_wav(std::span<const double> samples, double sample_rate,
                                     int bits_per_sample = 16, int channels = 1);

}  // namespace rgw
