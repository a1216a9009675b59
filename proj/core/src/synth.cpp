// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

constexpr std::uint64_t kNoiseStream = 0xD1B54A32D192ED03ULL;

struct UavSpec {
  const char* name;
  double rpm_low;
  double rpm_high;
  int rotors;
  int blades;
  int harmonics;
  double decay;
};

// RPM bands, rotor and blade counts per platform; the harmonic profile is a
// per-platform timbre choice.
constexpr UavSpec kUavs[] = {
    {"mavic-pro", 5000, 7800, 4, 2, 6, 0.6},
    {"mavic-pro-2", 5000, 7800, 4, 2, 6, 0.75},
    {"mavic-mini", 6000, 8500, 4, 2, 8, 0.5},
    {"mavic-3-pro", 4800, 7200, 4, 2, 6, 0.65},
    {"avata-2", 9000, 12000, 4, 3, 4, 0.6},
    {"matrice-30t", 2500, 4200, 4, 2, 8, 0.7},
};

}  // namespace

void SynthRecipe::validate() const {
  if (!(rpm_low > 0.0) || rpm_low > rpm_high) {
    throw InvalidParameterError("RPM range must satisfy 0 < low <= high");
  }
  if (blades_per_rotor < 1 || rotors < 1 || harmonics < 1 || sources < 0) {
    throw InvalidParameterError("blade, rotor and harmonic counts must be positive");
  }
  if (!(harmonic_decay > 0.0)) throw InvalidParameterError("harmonic decay must be positive");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw InvalidParameterError("duration must be positive and finite");
  }
  if (std::isnan(snr_db)) throw InvalidParameterError("SNR must not be NaN");
}

SynthRecipe uav_recipe(std::string_view model) {
  for (const UavSpec& s : kUavs) {
    if (model == s.name) {
      SynthRecipe r;
      r.rpm_low = s.rpm_low;
      r.rpm_high = s.rpm_high;
      r.rotors = s.rotors;
      r.blades_per_rotor = s.blades;
      r.harmonics = s.harmonics;
      r.harmonic_decay = s.decay;
      return r;
    }
  }
  throw InvalidParameterError("unknown UAV model '" + std::string(model) + "'");
}

std::vector<std::string> uav_models() {
  std::vector<std::string> out;
  for (const UavSpec& s : kUavs) out.emplace_back(s.name);
  return out;
}

std::size_t synth_length(const SynthRecipe& recipe, double sample_rate) {
  return static_cast<std::size_t>(std::llround(recipe.duration_s * sample_rate));
}

SynthPlan plan_synthesis(const SynthRecipe& recipe) {
  recipe.validate();
  std::mt19937_64 rng(recipe.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  SynthPlan plan;
  plan.noise_seed = recipe.seed ^ kNoiseStream;
  for (int s = 0; s < recipe.sources; ++s) {
    for (int r = 0; r < recipe.rotors; ++r) {
      RotorPlan rotor;
      rotor.rpm = recipe.rpm_low + (recipe.rpm_high - recipe.rpm_low) * unit(rng);
      rotor.blade_pass_hz = rotor.rpm / 60.0 * recipe.blades_per_rotor;
      rotor.drift_freq_hz = kDriftFreqLow + (kDriftFreqHigh - kDriftFreqLow) * unit(rng);
      rotor.drift_phase = two_pi * unit(rng);
      rotor.harmonic_phases.resize(recipe.harmonics);
      for (double& phase : rotor.harmonic_phases) phase = two_pi * unit(rng);
      plan.rotors.push_back(std::move(rotor));
    }
  }
  return plan;
}

std::vector<double> render_harmonics(const SynthRecipe& recipe, const SynthPlan& plan,
                                     double sample_rate) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(synth_length(recipe, sample_rate), 0.0);
  for (const RotorPlan& rotor : plan.rotors) {
    const double w = two_pi * rotor.drift_freq_hz;
    // Integrated instantaneous frequency of the drifting blade-pass tone.
    const double drift_scale = kDriftAmplitude / w;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      const double cycles =
          t - drift_scale * (std::cos(w * t + rotor.drift_phase) - std::cos(rotor.drift_phase));
      const double base = two_pi * rotor.blade_pass_hz * cycles;
      double amp = 1.0;
      double acc = 0.0;
      for (int h = 1; h <= recipe.harmonics; ++h) {
        acc += amp * std::sin(h * base + rotor.harmonic_phases[h - 1]);
        amp *= recipe.harmonic_decay;
      }
      out[i] += acc;
    }
  }
  return out;
}

std::vector<double> synthesize(const SynthRecipe& recipe, double sample_rate) {
  recipe.validate();
  if (recipe.sources > 0 &&
      sample_rate < 2.0 * recipe.harmonics * recipe.max_blade_pass_hz()) {
    throw InvalidParameterError(
        "sample rate " + std::to_string(sample_rate) + " Hz is below the Nyquist bound " +
        std::to_string(2.0 * recipe.harmonics * recipe.max_blade_pass_hz()) + " Hz");
  }
  const SynthPlan plan = plan_synthesis(recipe);
  std::vector<double> x = render_harmonics(recipe, plan, sample_rate);

  double noise_sigma = 0.0;
  if (recipe.sources == 0) {
    noise_sigma = std::isinf(recipe.snr_db) && recipe.snr_db > 0 ? 0.0 : 1.0;
  } else if (std::isfinite(recipe.snr_db)) {
    double power = 0.0;
    for (double v : x) power += v * v;
    power /= static_cast<double>(std::max<std::size_t>(x.size(), 1));
    noise_sigma = std::sqrt(power / std::pow(10.0, recipe.snr_db / 10.0));
  } else if (recipe.snr_db < 0) {
    throw InvalidParameterError("SNR of -inf would mean infinite noise");
  }
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(plan.noise_seed);
    std::normal_distribution<double> normal(0.0, noise_sigma);
    for (double& v : x) v += normal(rng);
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : x) v /= peak;
  }
  return x;
}

}  // namespace rgw
