// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <span>
#include <string>
#include <vector>

namespace rgw {

inline constexpr double kSilenceStdFloor = 1e-12;

/// One standardized fixed-length audio frame.
struct Segment {
  std::vector<double> samples;
  int label = 0;
  std::string source;
  double sample_rate = 0.0;
};

/// Samples per segment: round(segment_ms / 1000 * sample_rate).
int segment_length(double sample_rate, double segment_ms = 100.0);

/// In-place mean-0 / std-1 (population) standardization. Windows whose std is
/// below kSilenceStdFloor become all zeros. Returns false for that case.
bool standardize_in_place(std::span<double> window);

/// Splits `signal` into consecutive non-overlapping windows, drops the
/// trailing partial window and standardizes each one. Throws DataError when
/// the signal is shorter than one segment.
std::vector<Segment> segment_signal(std::span<const double> signal, double sample_rate,
                                    double segment_ms = 100.0, int label = 0,
                                    const std::string& source = {});

}  // namespace rgw
