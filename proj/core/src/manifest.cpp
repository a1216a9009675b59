// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "rgwnet/errors.hpp"
#include "rgwnet/wav.hpp"

namespace rgw {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("bad number '" + s + "' for " + what);
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& what) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("bad integer '" + s + "' for " + what);
  }
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

[[noreturn]] void rethrow_with_source(const Error& e, const std::string& source) {
  const std::string msg = source + ": " + e.what();
  if (e.kind() == "io") throw IoError(msg);
  if (e.kind() == "format") throw FormatError(msg);
  if (e.kind() == "invalid-parameter") throw InvalidParameterError(msg);
  throw DataError(msg);
}

}  // namespace

int DatasetManifest::segment_length() const { return rgw::segment_length(sample_rate, segment_ms); }

void DatasetManifest::validate() const {
  if (class_names.empty()) throw DataError("manifest declares no classes");
  if (entries.empty()) throw DataError("manifest has no entries");
  if (!(sample_rate > 0.0) || !(segment_ms > 0.0)) {
    throw DataError("manifest sample_rate and segment_ms must be positive");
  }
  // A class without entries is fine for evaluation; training rejects it in
  // check_dataset().
  for (const auto& e : entries) {
    if (e.label < 0 || e.label >= num_classes()) throw DataError("entry label out of range");
  }
}

std::string format_recipe(const SynthRecipe& r) {
  std::ostringstream out;
  out << "rpm=" << format_number(r.rpm_low) << '-' << format_number(r.rpm_high)
      << " blades=" << r.blades_per_rotor << " rotors=" << r.rotors
      << " harmonics=" << r.harmonics << " decay=" << format_number(r.harmonic_decay)
      << " snr_db=" << format_number(r.snr_db) << " duration=" << format_number(r.duration_s)
      << " seed=" << r.seed << " sources=" << r.sources;
  return out.str();
}

SynthRecipe parse_recipe(const std::string& fields) {
  SynthRecipe r;
  std::istringstream in(fields);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError("synth field '" + token + "' lacks '='");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "rpm") {
      const auto dash = value.find('-', 1);
      if (dash == std::string::npos) throw FormatError("rpm needs LOW-HIGH, got '" + value + "'");
      r.rpm_low = parse_double(value.substr(0, dash), "rpm");
      r.rpm_high = parse_double(value.substr(dash + 1), "rpm");
    } else if (key == "blades") {
      r.blades_per_rotor = parse_int<int>(value, key);
    } else if (key == "rotors") {
      r.rotors = parse_int<int>(value, key);
    } else if (key == "harmonics") {
      r.harmonics = parse_int<int>(value, key);
    } else if (key == "decay") {
      r.harmonic_decay = parse_double(value, key);
    } else if (key == "snr_db") {
      r.snr_db = parse_double(value, key);
    } else if (key == "duration") {
      r.duration_s = parse_double(value, key);
    } else if (key == "seed") {
      r.seed = parse_int<std::uint64_t>(value, key);
    } else if (key == "sources") {
      r.sources = parse_int<int>(value, key);
    } else {
      throw FormatError("unknown synth field '" + key + "'");
    }
  }
  r.validate();
  return r;
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  auto class_index = [&m](const std::string& name) {
    const auto it = std::find(m.class_names.begin(), m.class_names.end(), name);
    if (it == m.class_names.end()) throw FormatError("undeclared class '" + name + "'");
    return static_cast<int>(it - m.class_names.begin());
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const std::string key = trim(std::string_view(text).substr(0, colon));
    const std::string value = trim(std::string_view(text).substr(colon + 1));
    try {
      if (key == "sample_rate") {
        m.sample_rate = parse_double(value, key);
      } else if (key == "segment_ms") {
        m.segment_ms = parse_double(value, key);
      } else if (key == "seed") {
        m.seed = parse_int<std::uint64_t>(value, key);
      } else if (key == "class") {
        if (value.empty()) throw FormatError("empty class name");
        if (std::find(m.class_names.begin(), m.class_names.end(), value) != m.class_names.end()) {
          throw FormatError("class '" + value + "' declared twice");
        }
        m.class_names.push_back(value);
      } else if (key == "wav" || key == "synth") {
        const auto space = value.find_first_of(" \t");
        if (space == std::string::npos) throw FormatError(key + " record needs '<class> ...'");
        const int label = class_index(value.substr(0, space));
        const std::string rest = trim(std::string_view(value).substr(space));
        if (key == "wav") {
          m.entries.push_back({std::filesystem::path(rest), label});
        } else {
          m.entries.push_back({parse_recipe(rest), label});
        }
      } else {
        throw FormatError("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

void write_manifest(std::ostream& out, const DatasetManifest& m) {
  out << "# rgwnet dataset manifest\n";
  out << "sample_rate: " << format_number(m.sample_rate) << '\n';
  out << "segment_ms: " << format_number(m.segment_ms) << '\n';
  out << "seed: " << m.seed << '\n';
  for (const auto& name : m.class_names) out << "class: " << name << '\n';
  for (const auto& e : m.entries) {
    const std::string& cls = m.class_names.at(e.label);
    if (const auto* path = std::get_if<std::filesystem::path>(&e.source)) {
      out << "wav: " << cls << ' ' << path->generic_string() << '\n';
    } else {
      out << "synth: " << cls << ' ' << format_recipe(std::get<SynthRecipe>(e.source)) << '\n';
    }
  }
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_manifest(out, m);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<Segment> build_dataset(const DatasetManifest& manifest) {
  manifest.validate();
  std::vector<Segment> all;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    std::string source;
    try {
      std::vector<double> signal;
      if (const auto* path = std::get_if<std::filesystem::path>(&e.source)) {
        const auto full = path->is_absolute() ? *path : manifest.base_dir / *path;
        source = full.generic_string();
        WavAudio wav = load_wav(full);
        if (std::abs(wav.sample_rate - manifest.sample_rate) > 1e-9) {
          throw DataError("sample rate " + format_number(wav.sample_rate) +
                          " Hz differs from the manifest's " +
                          format_number(manifest.sample_rate) + " Hz");
        }
        signal = std::move(wav.samples);
      } else {
        source = "synth:" + manifest.class_names[e.label] + "#" + std::to_string(i);
        signal = synthesize(std::get<SynthRecipe>(e.source), manifest.sample_rate);
      }
      auto segs = segment_signal(signal, manifest.sample_rate, manifest.segment_ms, e.label, source);
      std::move(segs.begin(), segs.end(), std::back_inserter(all));
    } catch (const Error& err) {
      rethrow_with_source(err, source.empty() ? "entry " + std::to_string(i) : source);
    }
  }
  std::mt19937_64 rng(manifest.seed);
  std::shuffle(all.begin(), all.end(), rng);
  return all;
}

std::vector<std::string> preset_names() {
  return {"indoor-3class", "mixed-3class", "swarm", "outdoor-detect"};
}

DatasetManifest preset_manifest(const std::string& name, const PresetOptions& options) {
  if (options.segments_per_class < 1 || options.segments_per_take < 1) {
    throw ConfigError("segment counts must be positive");
  }
  // Per class: the recipes that successive takes cycle through.
  std::vector<std::string> classes;
  std::vector<std::vector<SynthRecipe>> recipes;
  double snr = 20.0;

  SynthRecipe noise;
  noise.sources = 0;
  SynthRecipe swarm_pair;
  swarm_pair.rpm_low = 5000;
  swarm_pair.rpm_high = 8500;
  swarm_pair.sources = 2;
  SynthRecipe swarm_triple = swarm_pair;
  swarm_triple.sources = 3;

  if (name == "indoor-3class") {
    classes = {"mavic-pro", "mavic-pro-2", "mavic-mini"};
    for (const auto& c : classes) recipes.push_back({uav_recipe(c)});
  } else if (name == "mixed-3class") {
    classes = {"mavic-pro", "mavic-mini", "matrice-30t"};
    for (const auto& c : classes) recipes.push_back({uav_recipe(c)});
  } else if (name == "swarm") {
    classes = {"noise", "single", "multiple"};
    recipes = {{noise},
               {uav_recipe("mavic-pro"), uav_recipe("mavic-pro-2"), uav_recipe("mavic-mini")},
               {swarm_pair, swarm_triple}};
  } else if (name == "outdoor-detect") {
    classes = {"noise", "drone"};
    recipes = {{noise},
               {uav_recipe("avata-2"), uav_recipe("matrice-30t"), uav_recipe("mavic-mini"),
                uav_recipe("mavic-3-pro")}};
    snr = 5.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  if (!std::isnan(options.snr_db)) snr = options.snr_db;

  DatasetManifest m;
  m.class_names = classes;
  m.sample_rate = options.sample_rate;
  m.segment_ms = 100.0;
  m.seed = options.seed;
  for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
    int remaining = options.segments_per_class;
    for (int take = 0; remaining > 0; ++take) {
      const int count = std::min(remaining, options.segments_per_take);
      remaining -= count;
      SynthRecipe r = recipes[c][take % recipes[c].size()];
      r.snr_db = snr;
      r.duration_s = count * m.segment_ms / 1000.0;
      r.seed = splitmix64(options.seed ^ (static_cast<std::uint64_t>(c) << 32) ^
                          static_cast<std::uint64_t>(take));
      m.entries.push_back({r, c});
    }
  }
  return m;
}

}  // namespace rgw
