// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "rgwnet/checkpoint.hpp"
#include "rgwnet/errors.hpp"
#include "rgwnet/manifest.hpp"
#include "rgwnet/synth.hpp"
#include "rgwnet/transform.hpp"
#include "rgwnet/wav.hpp"
#include "rgwnet/wavelet.hpp"

namespace rgw::cli {
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string percent(double v) { return fmt("%.2f%%", 100.0 * v); }

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

fs::path prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("missing --out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += sep;
    s += items[i];
  }
  return s;
}

std::vector<const Segment*> pointers(const std::vector<Segment>& data) {
  std::vector<const Segment*> p;
  p.reserve(data.size());
  for (const auto& s : data) p.push_back(&s);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_reports(const RunConfig& run, const std::string& command,
                   const std::vector<std::string>& classes, const EvalReport& report,
                   std::ostream& console) {
  std::ostringstream csv, summary;
  write_report_csv(csv, run, command, classes, report);
  write_summary(summary, run, command, classes, report);
  if (!run.out.empty()) {
    write_text(run.out / "report.csv", csv.str());
    write_text(run.out / "summary.txt", summary.str());
  }
  console << summary.str();
}

struct LoadedModel {
  Checkpoint ckpt;
  Network net;
};

LoadedModel load_model(const RunConfig& run) {
  require_file(run.checkpoint, "checkpoint");
  Checkpoint ckpt = load_checkpoint(run.checkpoint);
  Network net = ckpt.to_network();
  return {std::move(ckpt), std::move(net)};
}

DatasetManifest load_checked_manifest(const RunConfig& run) {
  require_file(run.manifest, "manifest");
  return load_manifest(run.manifest);
}

// Checkpoint and manifest must agree on segment length and class count.
void check_compatible(const NetworkConfig& net, const DatasetManifest& m) {
  if (net.segment_length != m.segment_length()) {
    throw ConfigError("checkpoint expects segments of " + std::to_string(net.segment_length) +
                      " samples, manifest yields " + std::to_string(m.segment_length()));
  }
  if (net.num_classes != m.num_classes()) {
    throw ConfigError("checkpoint has " + std::to_string(net.num_classes) +
                      " classes, manifest declares " + std::to_string(m.num_classes()));
  }
}

const Segment& pick_segment(const std::vector<Segment>& data, int index) {
  if (index < 0 || index >= static_cast<int>(data.size())) {
    throw IndexError("segment index " + std::to_string(index) + " outside [0, " +
                     std::to_string(data.size()) + ")");
  }
  return data[index];
}

WaveletParams require_wknn(const Network& net) {
  if (net.config().kind != ModelKind::kWkNN) {
    throw ConfigError("command needs a wknn checkpoint, got " +
                      std::string(to_string(net.config().kind)));
  }
  return net.wavelet_params();
}

void write_features(const fs::path& path, const Network& net, const Segment& seg) {
  const FeatureMap map = wavelet_transform(seg.samples, require_wknn(net), net.config().kernel_length);
  auto out = open_out(path);
  write_feature_map_csv(out, map);
}

}  // namespace

std::string display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kWkNN: return "WK-NN";
    case ModelKind::kCnn: return "CNN";
    case ModelKind::kFcnn: return "FCNN";
  }
  return "?";
}

void write_report_csv(std::ostream& out, const RunConfig& run, const std::string& command,
                      const std::vector<std::string>& class_names, const EvalReport& report) {
  const TrainConfig& t = run.train;
  out << "# command=" << command << '\n'
      << "# model=" << to_string(run.model) << '\n'
      << "# manifest=" << run.manifest.generic_string() << '\n'
      << "# classes=" << join(class_names, ',') << '\n'
      << "# epochs=" << t.epochs << '\n'
      << "# batch=" << t.batch_size << '\n'
      << "# folds=" << t.folds << '\n'
      << "# split=" << fmt("%g", t.split) << '\n'
      << "# seed=" << t.seed << '\n'
      << "# lr=" << fmt("%g", t.learning_rate) << '\n'
      << "# q=" << t.pool_size << '\n'
      << "# kernel_length=" << t.kernel_length << '\n'
      << "# scales=" << t.scales << '\n'
      << "# zeros=" << t.zeros << '\n'
      << "# poles=" << t.poles << '\n'
      << "# hidden=" << t.hidden << '\n'
      << "# normalization=" << to_string(t.normalization) << '\n'
      << "# mean=" << fmt("%.6f", report.mean) << '\n'
      << "# min=" << fmt("%.6f", report.min) << '\n'
      << "# max=" << fmt("%.6f", report.max) << '\n';
  const int c = static_cast<int>(class_names.size());
  out << "fold,accuracy,train_size,test_size";
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) out << ",cm_" << i << '_' << j;
  }
  out << '\n';
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const FoldResult& r = report.folds[f];
    out << f + 1 << ',' << fmt("%.6f", r.accuracy) << ',' << r.train_size << ',' << r.test_size;
    for (int i = 0; i < c; ++i) {
      for (int j = 0; j < c; ++j) out << ',' << r.confusion(i, j);
    }
    out << '\n';
  }
}

void write_summary(std::ostream& out, const RunConfig& run, const std::string& command,
                   const std::vector<std::string>& class_names, const EvalReport& report) {
  const TrainConfig& t = run.train;
  out << "rgwnet " << command << "  model=" << display_name(run.model)
      << "  manifest=" << run.manifest.generic_string() << '\n';
  out << "epochs=" << t.epochs << " batch=" << t.batch_size << " folds=" << t.folds
      << " q=" << t.pool_size << " kernel_length=" << t.kernel_length << " seed=" << t.seed
      << '\n';
  out << "classes: " << join(class_names, ' ') << "\n\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    out << "fold " << f + 1 << "  " << percent(report.folds[f].accuracy) << '\n';
  }
  char row[128];
  std::snprintf(row, sizeof row, "\n%-8s %9s %9s %9s\n", "model", "mean", "min", "max");
  out << row;
  std::snprintf(row, sizeof row, "%-8s %9s %9s %9s\n", display_name(run.model).c_str(),
                percent(report.mean).c_str(), percent(report.min).c_str(),
                percent(report.max).c_str());
  out << row;
}

void cmd_synth(const RunConfig& run, std::ostream& console) {
  if (run.preset.empty()) throw ConfigError("missing --preset");
  PresetOptions opt;
  opt.segments_per_class = run.segments;
  opt.sample_rate = run.sample_rate;
  opt.seed = run.train.seed;
  opt.snr_db = run.snr_db;
  const DatasetManifest preset = preset_manifest(run.preset, opt);
  const fs::path dir = prepare_out_dir(run.out);

  DatasetManifest out = preset;
  out.entries.clear();
  out.base_dir = dir;
  std::map<int, int> takes;
  for (const ManifestEntry& e : preset.entries) {
    const auto& recipe = std::get<SynthRecipe>(e.source);
    char name[96];
    std::snprintf(name, sizeof name, "%s_%03d.wav", preset.class_names[e.label].c_str(),
                  takes[e.label]++);
    write_wav(dir / name, synthesize(recipe, preset.sample_rate), preset.sample_rate);
    out.entries.push_back({fs::path(name), e.label});
  }
  save_manifest(dir / "manifest.txt", out);
  console << "wrote " << out.entries.size() << " recordings, " << run.segments
          << " segments per class, to " << (dir / "manifest.txt").generic_string() << '\n';
}

void cmd_train(const RunConfig& run, std::ostream& console) {
  run.train.validate();
  const DatasetManifest m = load_checked_manifest(run);
  prepare_out_dir(run.out);
  const std::vector<Segment> data = build_dataset(m);
  check_dataset(data, m.num_classes(), 1);
  const auto train = pointers(data);

  const NetworkConfig nc = run.train.network_config(run.model, m.segment_length(), m.num_classes());
  std::vector<EpochLog> log;
  const Network net = train_network(train, nc, run.train, run.train.seed, &log);

  EvalReport report;
  FoldResult fit = evaluate(net, train);
  fit.train_size = data.size();
  report.folds.push_back(fit);
  report.summarize();

  Checkpoint ckpt = make_checkpoint(net, run.train, run.train.seed);
  ckpt.extra = {{"classes", join(m.class_names, ',')},
                {"sample_rate", fmt("%.17g", m.sample_rate)},
                {"train_accuracy", fmt("%.17g", fit.accuracy)}};
  save_checkpoint(run.out / "model.ckpt", ckpt);

  std::ostringstream csv;
  csv << "epoch,mean_loss\n";
  for (const EpochLog& e : log) csv << e.epoch << ',' << fmt("%.10g", e.mean_loss) << '\n';
  write_text(run.out / "train_log.csv", csv.str());
  write_reports(run, "train", m.class_names, report, console);
  console << "final training accuracy " << fmt("%.6f", fit.accuracy) << '\n';
}

EvalReport cmd_crossval(const RunConfig& run, std::ostream& console) {
  run.train.validate();
  const DatasetManifest m = load_checked_manifest(run);
  if (!run.out.empty()) prepare_out_dir(run.out);
  const std::vector<Segment> data = build_dataset(m);
  std::vector<Network> nets;
  const EvalReport report = cross_validate(data, m.num_classes(), run.train, run.model, &nets);
  if (!run.out.empty()) {
    for (std::size_t f = 0; f < nets.size(); ++f) {
      Checkpoint ckpt = make_checkpoint(nets[f], run.train, run.train.seed + f);
      ckpt.extra = {{"classes", join(m.class_names, ',')},
                    {"sample_rate", fmt("%.17g", m.sample_rate)},
                    {"fold", std::to_string(f + 1)}};
      save_checkpoint(run.out / ("fold_" + std::to_string(f + 1) + ".ckpt"), ckpt);
    }
  }
  write_reports(run, "crossval", m.class_names, report, console);
  return report;
}

FoldResult cmd_eval(const RunConfig& run, std::ostream& console) {
  const LoadedModel model = load_model(run);
  const DatasetManifest m = load_checked_manifest(run);
  check_compatible(model.net.config(), m);
  if (!run.out.empty()) prepare_out_dir(run.out);
  const std::vector<Segment> data = build_dataset(m);
  FoldResult r = evaluate(model.net, pointers(data));

  RunConfig echo = run;
  echo.train = model.ckpt.training;
  echo.model = model.net.config().kind;
  EvalReport report;
  report.folds.push_back(r);
  report.summarize();
  write_reports(echo, "eval", m.class_names, report, console);
  console << "confusion (rows: true, cols: predicted)\n" << r.confusion << '\n';
  return r;
}

void cmd_extract(const RunConfig& run, std::ostream& console) {
  const LoadedModel model = load_model(run);
  const DatasetManifest m = load_checked_manifest(run);
  check_compatible(model.net.config(), m);
  const fs::path dir = prepare_out_dir(run.out);
  const std::vector<Segment> data = build_dataset(m);
  const fs::path path = dir / ("features_" + std::to_string(run.segment_index) + ".csv");
  write_features(path, model.net, pick_segment(data, run.segment_index));
  console << "wrote " << path.generic_string() << '\n';
}

void cmd_export_wavelets(const RunConfig& run, std::ostream& console) {
  const LoadedModel model = load_model(run);
  const WaveletParams params = require_wknn(model.net);
  const fs::path dir = prepare_out_dir(run.out);
  const int M = model.net.config().kernel_length;

  std::ostringstream csv;
  csv << "scale_index,grid,tap,lambda\n";
  for (int k = 1; k <= params.num_scales(); ++k) {
    const SampledKernel kernel = sample_kernel(params, k, M);
    for (int j = 0; j < M; ++j) {
      csv << k << ',' << fmt("%.1f", kernel.grid[j]) << ',' << fmt("%.17g", kernel.values[j])
          << ',' << fmt("%.17g", kernel.dilation) << '\n';
    }
  }
  write_text(dir / "wavelets.csv", csv.str());
  console << "wrote " << params.num_scales() << " kernel blocks to "
          << (dir / "wavelets.csv").generic_string() << '\n';

  if (run.with_features) {
    const DatasetManifest m = load_checked_manifest(run);
    check_compatible(model.net.config(), m);
    const std::vector<Segment> data = build_dataset(m);
    const fs::path path = dir / ("features_" + std::to_string(run.segment_index) + ".csv");
    write_features(path, model.net, pick_segment(data, run.segment_index));
    console << "wrote " << path.generic_string() << '\n';
  }
}

}  // namespace rgw::cli
