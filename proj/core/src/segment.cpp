// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/segment.hpp"

#include <algorithm>
#include <cmath>

#include "rgwnet/errors.hpp"

namespace rgw {

int segment_length(double sample_rate, double segment_ms) {
  if (!(sample_rate > 0.0) || !(segment_ms > 0.0)) {
    throw InvalidParameterError("sample rate and segment duration must be positive");
  }
  return static_cast<int>(std::lround(segment_ms / 1000.0 * sample_rate));
}

bool standardize_in_place(std::span<double> window) {
  if (window.empty()) return false;
  double mean = 0.0;
  for (double x : window) mean += x;
  mean /= static_cast<double>(window.size());
  double var = 0.0;
  for (double x : window) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(window.size()));
  if (sd < kSilenceStdFloor) {
    std::fill(window.begin(), window.end(), 0.0);
    return false;
  }
  for (double& x : window) x = (x - mean) / sd;
  return true;
}

std::vector<Segment> segment_signal(std::span<const double> signal, double sample_rate,
                                    double segment_ms, int label, const std::string& source) {
  const int length = segment_length(sample_rate, segment_ms);
  if (length < 1 || signal.size() < static_cast<std::size_t>(length)) {
    throw DataError("signal of " + std::to_string(signal.size()) +
                    " samples is shorter than one " + std::to_string(length) +
                    "-sample segment");
  }
  const std::size_t count = signal.size() / static_cast<std::size_t>(length);
  std::vector<Segment> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = i * static_cast<std::size_t>(length);
    Segment seg;
    seg.samples.assign(signal.begin() + offset, signal.begin() + offset + length);
    standardize_in_place(seg.samples);
    seg.label = label;
    seg.source = source.empty() ? "@" + std::to_string(offset)
                                : source + "@" + std::to_string(offset);
    seg.sample_rate = sample_rate;
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace rgw
