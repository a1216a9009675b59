// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace rgw {

/// Recipe for a synthetic multirotor recording. Each rotor contributes a
/// harmonic series on its blade-pass frequency RPM / 60 * blades.
struct SynthRecipe {
  double rpm_low = 5000.0;
  double rpm_high = 7800.0;
  int blades_per_rotor = 2;
  int rotors = 4;
  int harmonics = 6;
  double harmonic_decay = 0.6;  // amplitude ratio between consecutive harmonics
  double snr_db = std::numeric_limits<double>::infinity();  // +inf: no noise
  double duration_s = 1.0;
  std::uint64_t seed = 0;
  int sources = 1;  // superposed vehicles; 0 = background noise only

  void validate() const;
  double max_blade_pass_hz() const { return rpm_high / 60.0 * blades_per_rotor; }
  double min_blade_pass_hz() const { return rpm_low / 60.0 * blades_per_rotor; }
};

/// Recipe with the rotor/blade/RPM figures of a known platform:
/// mavic-pro, mavic-pro-2, mavic-mini, mavic-3-pro, avata-2, matrice-30t.
SynthRecipe uav_recipe(std::string_view model);
std::vector<std::string> uav_models();

/// Peak-to-peak bounded RPM drift: rpm(t) = rpm0 * (1 + A sin(2 pi f t + phi)),
/// with A * 2 pi * f <= 2 % per second.
inline constexpr double kDriftAmplitude = 0.01;
inline constexpr double kDriftFreqLow = 0.05;
inline constexpr double kDriftFreqHigh = 0.3;

struct RotorPlan {
  double rpm = 0.0;
  double blade_pass_hz = 0.0;
  double drift_freq_hz = 0.0;
  double drift_phase = 0.0;
  std::vector<double> harmonic_phases;  // one per harmonic
};

/// Every random draw of a recording, fixed up front so the rendering is a
/// pure function of the plan.
struct SynthPlan {
  std::vector<RotorPlan> rotors;  // sources * rotors entries
  std::uint64_t noise_seed = 0;
};

SynthPlan plan_synthesis(const SynthRecipe& recipe);

/// Noise-free harmonic sum of a plan, before peak normalization.
std::vector<double> render_harmonics(const SynthRecipe& recipe, const SynthPlan& plan,
                                     double sample_rate);

/// Full recording: harmonic sum plus white Gaussian noise at the recipe's
/// SNR, peak-normalized to [-1, 1]. Throws InvalidParameterError when
/// sample_rate < 2 * harmonics * max blade-pass frequency.
std::vector<double> synthesize(const SynthRecipe& recipe, double sample_rate);

/// Number of samples of a recording: round(duration_s * sample_rate).
std::size_t synth_length(const SynthRecipe& recipe, double sample_rate);

}  // namespace rgw
