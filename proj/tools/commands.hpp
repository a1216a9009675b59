// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>

#include "rgwnet/network.hpp"
#include "rgwnet/training.hpp"

namespace rgw::cli {

/// Everything one command needs. Fields that a command does not use are ignored.
struct RunConfig {
  TrainConfig train;
  ModelKind model = ModelKind::kWkNN;
  std::filesystem::path manifest;
  std::filesystem::path checkpoint;
  std::filesystem::path out;

  // synth
  std::string preset;
  int segments = 100;  // per class
  double sample_rate = 8000.0;
  double snr_db = std::numeric_limits<double>::quiet_NaN();  // NaN: preset default

  // extract / export-wavelets
  int segment_index = 0;
  bool with_features = false;
};

/// Writes one WAV per take and `manifest.txt` (wav records) into `out`.
void cmd_synth(const RunConfig& run, std::ostream& console);

/// Trains on the whole manifest. Writes model.ckpt, train_log.csv,
/// report.csv and summary.txt into `out`.
void cmd_train(const RunConfig& run, std::ostream& console);

/// Repeated random-split validation. Writes fold_<k>.ckpt, report.csv and
/// summary.txt into `out`.
EvalReport cmd_crossval(const RunConfig& run, std::ostream& console);

/// Scores `checkpoint` on `manifest`. Writes report.csv and summary.txt when
/// `out` is set.
FoldResult cmd_eval(const RunConfig& run, std::ostream& console);

/// Raw wavelet coefficients of one manifest segment as FeatureMap CSV.
void cmd_extract(const RunConfig& run, std::ostream& console);

/// Sampled kernels of a WK-NN checkpoint (wavelets.csv), plus the FeatureMap
/// of one segment when `with_features` is set.
void cmd_export_wavelets(const RunConfig& run, std::ostream& console);

/// Report CSV: `# key=value` header lines, then one row per fold with
/// accuracy, split sizes and the row-major confusion counts cm_<true>_<pred>.
void write_report_csv(std::ostream& out, const RunConfig& run, const std::string& command,
                      const std::vector<std::string>& class_names, const EvalReport& report);

/// Plain-text summary table: per-fold accuracies and mean/min/max.
void write_summary(std::ostream& out, const RunConfig& run, const std::string& command,
                   const std::vector<std::string>& class_names, const EvalReport& report);

/// Display name used in summaries ("WK-NN", "CNN", "FCNN").
std::string display_name(ModelKind kind);

}  // namespace rgw::cli
