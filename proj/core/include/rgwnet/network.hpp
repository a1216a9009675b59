// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "rgwnet/segment.hpp"
#include "rgwnet/transform.hpp"
#include "rgwnet/wavelet.hpp"

namespace rgw {

enum class ModelKind {
  kWkNN,  // RGW wavelet front end
  kCnn,   // free learned kernel taps, same pooling/head
  kFcnn,  // no front end: the raw segment feeds the dense head
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // "wknn" | "cnn" | "fcnn"

std::string_view to_string(Normalization mode);
Normalization parse_normalization(std::string_view name);  // "std" | "variance" | "none"

/// Architecture of a classifier. Binary problems use one sigmoid output,
/// otherwise one softmax output per class.
struct NetworkConfig {
  ModelKind kind = ModelKind::kWkNN;
  int segment_length = 0;
  int num_classes = 2;
  int kernel_length = 32;
  int scales = 10;  // m
  int zeros = 1;    // p
  int poles = 10;   // n
  int pool_size = 32;
  int hidden = 200;
  Normalization normalization = Normalization::kStd;

  bool has_front_end() const { return kind != ModelKind::kFcnn; }
  int input_width() const { return has_front_end() ? scales * pool_size : segment_length; }
  int output_width() const { return num_classes == 2 ? 1 : num_classes; }
  void validate() const;

  bool operator==(const NetworkConfig&) const = default;
};

/// A named view into the flat parameter vector (row-major rows x cols).
struct TensorSlot {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

/// Parameter layout in declared order: front end, dense1.weight,
/// dense1.bias, dense2.weight, dense2.bias.
std::vector<TensorSlot> parameter_layout(const NetworkConfig& config);

/// A classifier: its configuration plus one flat parameter vector.
class Network {
 public:
  Network(NetworkConfig config, std::vector<double> parameters);

  /// Fresh network. Dense layers are He-uniform with zero bias; wavelet
  /// zeros ~ U[0.5, 2], Re(z) ~ U[-1, 1], Im(z) ~ +-U[0.2, 1], log-dilations
  /// evenly spaced so lambda covers [1, kernel_length / 4].
  static Network initialize(const NetworkConfig& config, std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }
  const std::vector<TensorSlot>& layout() const { return layout_; }
  const TensorSlot& slot(std::string_view name) const;

  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  std::span<const double> tensor(std::string_view name) const;

  /// Learnable scalars before the dense head (p + 2n + m, m * M, or 0).
  int front_end_parameter_count() const;

  /// Wavelet bank of a WK-NN (throws ConfigError for other kinds).
  WaveletParams wavelet_params() const;

  /// Re-applies the pole guard to a WK-NN. Returns the number of clamped poles.
  int apply_constraints();

  /// Output activation: {p(class 1)} for binary, softmax probabilities otherwise.
  std::vector<double> forward(std::span<const double> segment) const;
  int predict(std::span<const double> segment) const;

 private:
  NetworkConfig config_;
  std::vector<TensorSlot> layout_;
  std::vector<double> params_;
};

/// Everything a backward pass needs from one forward pass.
struct ForwardTrace {
  TransformCache front;
  Eigen::VectorXd input;   // flattened features before the first ReLU
  Eigen::VectorXd hidden;  // pre-activation of the hidden layer
  std::vector<double> output;
};

/// A network frozen for repeated evaluation: the front end is sampled once.
/// Read-only and safe to share between threads.
class PreparedNetwork {
 public:
  explicit PreparedNetwork(const Network& net);

  std::vector<double> forward(std::span<const double> segment, ForwardTrace* trace = nullptr) const;

  /// Adds dLoss/dparams of the traced example into `grad` (same layout as the
  /// network parameters) and returns its loss.
  double backward(const ForwardTrace& trace, int label, std::span<double> grad) const;

  const NetworkConfig& config() const { return net_->config(); }

 private:
  const Network* net_;
  std::optional<RgwTransform> rgw_;
  std::optional<ConvPoolStage> conv_;
};

/// Predicted class from an output-activation vector.
int predicted_class(std::span<const double> output);

/// Cross-entropy with probability floor 1e-12. A one-element vector is a
/// sigmoid output p(class 1); otherwise a softmax distribution.
double cross_entropy(std::span<const double> probabilities, int label);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config = {}) : config_(config) {}

  void step(std::span<double> params, std::span<const double> grads);

  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

/// Rescales `grads` so its L2 norm is at most max_norm. Returns the norm
/// before clipping.
double clip_global_norm(std::span<double> grads, double max_norm);

struct TrainStepOptions {
  double clip_norm = 5.0;
  std::size_t batch_index = 0;
};

/// One Adam update on the mean batch loss; returns that loss. Throws
/// TrainingError (carrying batch_index) on a non-finite loss or gradient.
double train_step(Network& net, std::span<const Segment* const> batch, AdamOptimizer& optimizer,
                  const TrainStepOptions& options = {});

/// Mean loss and its gradient over a batch without updating anything.
double batch_loss_and_gradient(const Network& net, std::span<const Segment* const> batch,
                               std::vector<double>& grad);

}  // namespace rgw
