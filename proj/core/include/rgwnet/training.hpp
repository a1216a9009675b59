// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rgwnet/network.hpp"
#include "rgwnet/segment.hpp"

namespace rgw {

struct TrainConfig {
  int epochs = 300;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int folds = 5;
  double split = 0.8;  // train fraction
  std::uint64_t seed = 42;
  int pool_size = 32;  // Q
  int kernel_length = 32;
  int scales = 10;  // m
  int zeros = 1;    // p
  int poles = 10;   // n
  int hidden = 200;
  double clip_norm = 5.0;
  Normalization normalization = Normalization::kStd;
  int jobs = 1;  // folds trained concurrently

  void validate() const;
  NetworkConfig network_config(ModelKind kind, int segment_length, int num_classes) const;
};

using ConfusionMatrix = Eigen::MatrixXi;  // rows: true class, cols: predicted

/// Fraction of exact matches, (N_tp + N_tn) / N_total in the binary case.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

struct FoldResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct EvalReport {
  std::vector<FoldResult> folds;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  std::vector<double> accuracies() const;
  /// Recomputes mean/min/max from `folds`.
  void summarize();
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
};

/// Trains a freshly initialized network on `train` for config.epochs epochs,
/// reshuffling every epoch. Initialization and shuffling derive from `seed`.
Network train_network(std::span<const Segment* const> train, const NetworkConfig& net_config,
                      const TrainConfig& config, std::uint64_t seed,
                      std::vector<EpochLog>* log = nullptr);

/// Evaluates `net` on `data`: accuracy plus confusion matrix.
FoldResult evaluate(const Network& net, std::span<const Segment* const> data);

/// A fitted model reduced to a predictor, for the generic harness.
using Predictor = std::function<int(const Segment&)>;
using FitFunction = std::function<Predictor(std::span<const Segment* const> train, int fold)>;

/// Repeated random-split validation: for each fold draw a fresh split with
/// seed + fold, fit on the train part and score the held-out part.
EvalReport cross_validate_with(std::span<const Segment> data, int num_classes, int folds,
                               double split, std::uint64_t seed, const FitFunction& fit,
                               int jobs = 1);

/// The full protocol for one model kind. Each fold reinitializes the network
/// with seed + fold. `trained`, if given, receives every fold's network.
EvalReport cross_validate(std::span<const Segment> data, int num_classes, const TrainConfig& config,
                          ModelKind kind, std::vector<Network>* trained = nullptr);

/// Throws DataError when a class has no segments or the dataset is smaller
/// than folds * classes.
void check_dataset(std::span<const Segment> data, int num_classes, int folds);

}  // namespace rgw
