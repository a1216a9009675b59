// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

// Runs body(0..count-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::clamp(jobs, 1, std::max(count, 1));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || folds < 1 || pool_size < 1 || kernel_length < 2 ||
      scales < 1 || zeros < 0 || poles < 1 || hidden < 1 || jobs < 1) {
    throw ConfigError("training counts must be positive");
  }
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie strictly in (0, 1)");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
}

NetworkConfig TrainConfig::network_config(ModelKind kind, int segment_length,
                                          int num_classes) const {
  NetworkConfig cfg;
  cfg.kind = kind;
  cfg.segment_length = segment_length;
  cfg.num_classes = num_classes;
  cfg.kernel_length = kernel_length;
  cfg.scales = scales;
  cfg.zeros = zeros;
  cfg.poles = poles;
  cfg.pool_size = pool_size;
  cfg.hidden = hidden;
  cfg.normalization = normalization;
  return cfg;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw ShapeError("prediction/label count mismatch");
  if (labels.empty()) throw DataError("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

std::vector<double> EvalReport::accuracies() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.accuracy);
  return out;
}

void EvalReport::summarize() {
  if (folds.empty()) {
    mean = min = max = 0.0;
    return;
  }
  const auto acc = accuracies();
  mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
  min = *std::min_element(acc.begin(), acc.end());
  max = *std::max_element(acc.begin(), acc.end());
}

void check_dataset(std::span<const Segment> data, int num_classes, int folds) {
  if (num_classes < 1) throw DataError("dataset declares no classes");
  std::vector<std::size_t> counts(num_classes, 0);
  for (const Segment& s : data) {
    if (s.label < 0 || s.label >= num_classes) {
      throw DataError("segment label " + std::to_string(s.label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    ++counts[s.label];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) throw DataError("class " + std::to_string(c) + " has no segments");
  }
  if (data.size() < static_cast<std::size_t>(folds) * num_classes) {
    throw DataError("dataset has " + std::to_string(data.size()) + " segments, need at least " +
                    std::to_string(folds * num_classes));
  }
}

Network train_network(std::span<const Segment* const> train, const NetworkConfig& net_config,
                      const TrainConfig& config, std::uint64_t seed, std::vector<EpochLog>* log) {
  config.validate();
  if (train.empty()) throw DataError("empty training set");
  Network net = Network::initialize(net_config, seed);
  AdamOptimizer optimizer(AdamConfig{.learning_rate = config.learning_rate});
  std::mt19937_64 rng(seed ^ kShuffleStream);

  std::vector<const Segment*> order(train.begin(), train.end());
  std::size_t batch_index = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const Segment* const> batch(order.data() + start, end - start);
      loss_sum += train_step(net, batch, optimizer,
                             {.clip_norm = config.clip_norm, .batch_index = batch_index++});
      ++batches;
    }
    if (log != nullptr) log->push_back({epoch + 1, loss_sum / static_cast<double>(batches)});
  }
  return net;
}

FoldResult evaluate(const Network& net, std::span<const Segment* const> data) {
  const int classes = net.config().num_classes;
  FoldResult result;
  result.confusion = ConfusionMatrix::Zero(classes, classes);
  result.test_size = data.size();
  std::vector<int> predictions;
  std::vector<int> labels;
  const PreparedNetwork prepared(net);
  for (const Segment* seg : data) {
    const int pred = predicted_class(prepared.forward(seg->samples));
    if (seg->label < 0 || seg->label >= classes) {
      throw DataError("segment label " + std::to_string(seg->label) + " outside the model's " +
                      std::to_string(classes) + " classes");
    }
    predictions.push_back(pred);
    labels.push_back(seg->label);
    ++result.confusion(seg->label, pred);
  }
  result.accuracy = accuracy(predictions, labels);
  return result;
}

EvalReport cross_validate_with(std::span<const Segment> data, int num_classes, int folds,
                               double split, std::uint64_t seed, const FitFunction& fit,
                               int jobs) {
  if (folds < 1) throw ConfigError("folds must be positive");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie strictly in (0, 1)");
  check_dataset(data, num_classes, folds);

  const std::size_t n = data.size();
  const std::size_t n_train =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(split * n)), 1, n - 1);

  EvalReport report;
  report.folds.resize(folds);
  parallel_for(folds, jobs, [&](int fold) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(fold));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<const Segment*> train;
    std::vector<const Segment*> test;
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(&data[idx[i]]);

    const Predictor predict = fit(train, fold);
    FoldResult& result = report.folds[fold];
    result.confusion = ConfusionMatrix::Zero(num_classes, num_classes);
    result.train_size = train.size();
    result.test_size = test.size();
    std::vector<int> predictions;
    std::vector<int> labels;
    for (const Segment* seg : test) {
      const int pred = predict(*seg);
      predictions.push_back(pred);
      labels.push_back(seg->label);
      if (pred >= 0 && pred < num_classes) ++result.confusion(seg->label, pred);
    }
    result.accuracy = accuracy(predictions, labels);
  });
  report.summarize();
  return report;
}

EvalReport cross_validate(std::span<const Segment> data, int num_classes, const TrainConfig& config,
                          ModelKind kind, std::vector<Network>* trained) {
  config.validate();
  if (data.empty()) throw DataError("empty dataset");
  const int length = static_cast<int>(data.front().samples.size());
  for (const Segment& s : data) {
    if (static_cast<int>(s.samples.size()) != length) {
      throw DataError("segments of different lengths in one dataset");
    }
  }
  const NetworkConfig net_config = config.network_config(kind, length, num_classes);
  net_config.validate();

  std::vector<std::optional<Network>> nets(config.folds);
  const FitFunction fit = [&](std::span<const Segment* const> train, int fold) -> Predictor {
    nets[fold].emplace(
        train_network(train, net_config, config, config.seed + static_cast<std::uint64_t>(fold)));
    auto prepared = std::make_shared<PreparedNetwork>(*nets[fold]);
    return [prepared](const Segment& s) { return predicted_class(prepared->forward(s.samples)); };
  };
  EvalReport report =
      cross_validate_with(data, num_classes, config.folds, config.split, config.seed, fit, config.jobs);
  if (trained != nullptr) {
    trained->clear();
    for (auto& n : nets) trained->push_back(std::move(*n));
  }
  return report;
}

}  // namespace rgw
