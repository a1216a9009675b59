// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors
//
// rgwnet: synthesize scenario data, train and cross-validate RGW kernel
// networks and their baselines, evaluate checkpoints, export wavelets.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "commands.hpp"
#include "rgwnet/errors.hpp"
#include "rgwnet/manifest.hpp"

namespace {

using rgw::cli::RunConfig;

void add_training_flags(CLI::App* cmd, RunConfig& run, std::string& model, std::string& norm) {
  rgw::TrainConfig& t = run.train;
  cmd->add_option("--manifest", run.manifest, "Dataset manifest")->required();
  cmd->add_option("--model", model, "Model kind")
      ->check(CLI::IsMember({"wknn", "cnn", "fcnn"}))
      ->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch", t.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--folds", t.folds, "Cross-validation repetitions")->capture_default_str();
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--q", t.pool_size, "Top-Q pooling width")->capture_default_str();
  cmd->add_option("--kernel-length", t.kernel_length, "Kernel taps M")->capture_default_str();
  cmd->add_option("--scales", t.scales, "Wavelet scales / CNN channels m")->capture_default_str();
  cmd->add_option("--poles", t.poles, "Complex poles n")->capture_default_str();
  cmd->add_option("--zeros", t.zeros, "Real zeros p")->capture_default_str();
  cmd->add_option("--hidden", t.hidden, "Hidden dense width")->capture_default_str();
  cmd->add_option("--normalization", norm, "Feature-map normalization")
      ->check(CLI::IsMember({"std", "variance"}))
      ->capture_default_str();
  cmd->add_option("--jobs", t.jobs, "Folds trained concurrently")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGW wavelet-kernel networks for acoustic UAV detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rgwnet 0.1.0");

  RunConfig run;
  std::string model = "wknn";
  std::string norm = "std";
  std::uint64_t seed = run.train.seed;

  auto* synth = app.add_subcommand("synth", "Write a synthetic scenario as WAV files + manifest");
  std::string presets;
  for (const auto& p : rgw::preset_names()) presets += (presets.empty() ? "" : ", ") + p;
  synth->add_option("--preset", run.preset, "Scenario preset: " + presets)->required();
  synth->add_option("--segments", run.segments, "Segments per class")->capture_default_str();
  synth->add_option("--sample-rate", run.sample_rate, "Sample rate in Hz")->capture_default_str();
  synth->add_option("--snr", run.snr_db, "Override the preset SNR (dB)");
  synth->add_option("--seed", seed, "Random seed")->capture_default_str();
  synth->add_option("--out", run.out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train one network on a whole manifest");
  add_training_flags(train, run, model, norm);
  train->add_option("--seed", seed, "Random seed")->capture_default_str();
  train->add_option("--out", run.out, "Output directory")->required();

  auto* crossval = app.add_subcommand("crossval", "Repeated 80/20 random-split validation");
  add_training_flags(crossval, run, model, norm);
  crossval->add_option("--seed", seed, "Random seed")->capture_default_str();
  crossval->add_option("--out", run.out, "Output directory for checkpoints and reports");

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a manifest");
  eval->add_option("--checkpoint", run.checkpoint, "Checkpoint file")->required();
  eval->add_option("--manifest", run.manifest, "Dataset manifest")->required();
  eval->add_option("--out", run.out, "Output directory for reports");

  auto* extract = app.add_subcommand("extract", "FeatureMap CSV of one segment (wknn only)");
  extract->add_option("--checkpoint", run.checkpoint, "Checkpoint file")->required();
  extract->add_option("--manifest", run.manifest, "Dataset manifest")->required();
  extract->add_option("--segment", run.segment_index, "Segment index after shuffling")
      ->capture_default_str();
  extract->add_option("--out", run.out, "Output directory")->required();

  auto* wavelets = app.add_subcommand("export-wavelets", "Sampled kernels of a wknn checkpoint");
  wavelets->add_option("--checkpoint", run.checkpoint, "Checkpoint file")->required();
  wavelets->add_option("--manifest", run.manifest, "Also export one segment's FeatureMap");
  wavelets->add_option("--segment", run.segment_index, "Segment index for --manifest")
      ->capture_default_str();
  wavelets->add_option("--out", run.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    return 2;
  }

  try {
    run.train.seed = seed;
    run.model = rgw::parse_model_kind(model);
    run.train.normalization = rgw::parse_normalization(norm);
    run.with_features = !run.manifest.empty();
    if (synth->parsed()) rgw::cli::cmd_synth(run, std::cout);
    if (train->parsed()) rgw::cli::cmd_train(run, std::cout);
    if (crossval->parsed()) rgw::cli::cmd_crossval(run, std::cout);
    if (eval->parsed()) rgw::cli::cmd_eval(run, std::cout);
    if (extract->parsed()) rgw::cli::cmd_extract(run, std::cout);
    if (wavelets->parsed()) rgw::cli::cmd_export_wavelets(run, std::cout);
  } catch (const rgw::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error[io]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
