// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rgwnet/segment.hpp"
#include "rgwnet/synth.hpp"

namespace rgw {

/// One labeled source: a WAV file or a synthetic recipe.
struct ManifestEntry {
  std::variant<std::filesystem::path, SynthRecipe> source;
  int label = 0;
};

/// Plain-text dataset catalog. Record syntax, one per line (`#` comments):
///
///   sample_rate: 8000
///   segment_ms: 100
///   seed: 7
///   class: <name>                       declares the next label
///   wav: <class> <path>                 path relative to the manifest file
///   synth: <class> rpm=LO-HI blades=B rotors=R harmonics=H decay=D
///          snr_db=S|inf duration=SEC seed=N sources=K
struct DatasetManifest {
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> entries;
  double sample_rate = 8000.0;
  double segment_ms = 100.0;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;  // resolves relative WAV paths

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int segment_length() const;
  void validate() const;
};

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const DatasetManifest& manifest);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

std::string format_recipe(const SynthRecipe& recipe);
SynthRecipe parse_recipe(const std::string& fields);

/// Loads or synthesizes every entry, segments and labels it, then shuffles
/// deterministically with the manifest seed. Source errors keep their kind
/// and are prefixed with the offending entry.
std::vector<Segment> build_dataset(const DatasetManifest& manifest);

/// Scaled-down scenario catalogs:
///   indoor-3class   mavic-pro / mavic-pro-2 / mavic-mini, SNR 20 dB
///   mixed-3class    mavic-pro / mavic-mini / matrice-30t, SNR 20 dB
///   swarm           noise / single / multiple (2-3 superposed), SNR 20 dB
///   outdoor-detect  noise / drone (avata-2, matrice-30t, mavic-mini, mavic-3-pro), SNR 5 dB
/// Each class receives exactly `segments_per_class` segments spread over
/// recordings ("takes") of at most `segments_per_take` segments.
struct PresetOptions {
  int segments_per_class = 100;
  double sample_rate = 8000.0;
  std::uint64_t seed = 1;
  double snr_db = std::numeric_limits<double>::quiet_NaN();  // NaN: preset default
  int segments_per_take = 50;
};

DatasetManifest preset_manifest(const std::string& name, const PresetOptions& options);
std::vector<std::string> preset_names();

}  // namespace rgw
